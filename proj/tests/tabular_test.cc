// Copyright 2026 The rutk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rutk/tabular.h"

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "rutk/error.h"
#include "test_support.h"

namespace rutk {
namespace {

using testing::FromCsv;
using testing::MakeSchema;

std::shared_ptr<const Schema> SexAgeSchema() {
  return MakeSchema({VariableSpec::Categorical("SEX", {"1", "2"}),
                     VariableSpec::Integer("AGE", 0, 95, true)});
}

TEST(SchemaTest, MissingLabelBecomesALevel) {
  Schema s("d", {VariableSpec::Categorical("ECON", {"1", "2"}, true)});
  const VariableSpec& v = s.variable("ECON");
  ASSERT_EQ(v.categories.size(), 3u);
  EXPECT_EQ(v.categories.back(), "NA");
  EXPECT_EQ(v.MissingCode(), 2);
  EXPECT_TRUE(v.IsMissing(2));
  EXPECT_FALSE(v.IsMissing(0));
}

TEST(SchemaTest, RejectsDuplicateNames) {
  EXPECT_THROW(Schema("d", {VariableSpec::Categorical("A", {"x"}),
                            VariableSpec::Categorical("A", {"y"})}),
               Error);
}

TEST(SchemaTest, UnknownVariableThrows) {
  Schema s("d", {VariableSpec::Categorical("A", {"x"})});
  try {
    s.IndexOf("B");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownVariable);
  }
}

TEST(SchemaTest, JsonRoundTrip) {
  Schema s("d", {VariableSpec::Categorical("SEX", {"1", "2"}),
                 VariableSpec::Integer("AGE", 0, 95, true),
                 VariableSpec::Categorical("E", {"a", "b"}, true)});
  Schema back = ParseSchemaJson(SchemaToJson(s));
  EXPECT_TRUE(back.SameLayout(s));
  EXPECT_EQ(back.dataset_name(), "d");
}

TEST(SchemaTest, JsonErrorsNameTheField) {
  try {
    ParseSchemaJson(R"({"variables":[{"name":"A","kind":"weird"}]})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
    EXPECT_NE(std::string(e.what()).find("variables[0].kind"), std::string::npos);
  }
}

TEST(CsvTest, LoadsWithMissingInteger) {
  Dataset ds = FromCsv(SexAgeSchema(), "SEX,AGE\n1,30\n2,\n");
  ASSERT_EQ(ds.n_rows(), 2u);
  EXPECT_EQ(ds.at(0, 1), 30);
  EXPECT_EQ(ds.at(1, 1), kMissingInteger);
  EXPECT_EQ(ds.at(1, 0), 1);
}

TEST(CsvTest, UnknownCategoryReportsCell) {
  auto schema = MakeSchema({VariableSpec::Categorical("SEX", {"1", "2"})});
  try {
    FromCsv(schema, "SEX\n3\n");
    FAIL();
  } catch (const CellError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCategoryUnknown);
    EXPECT_EQ(e.row(), 2);
    EXPECT_EQ(e.column(), "SEX");
    EXPECT_EQ(e.value(), "3");
  }
}

TEST(CsvTest, MissingColumn) {
  try {
    FromCsv(SexAgeSchema(), "SEX\n1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingColumn);
  }
}

TEST(CsvTest, OutOfRangeAndNonInteger) {
  EXPECT_THROW(FromCsv(SexAgeSchema(), "SEX,AGE\n1,96\n"), CellError);
  EXPECT_THROW(FromCsv(SexAgeSchema(), "SEX,AGE\n1,3.5\n"), CellError);
  EXPECT_THROW(FromCsv(SexAgeSchema(), "SEX,AGE\n1\n"), CellError);
}

TEST(CsvTest, MissingNotAllowed) {
  auto schema = MakeSchema({VariableSpec::Integer("AGE", 0, 95, false)});
  EXPECT_THROW(FromCsv(schema, "AGE\n\n"), CellError);
}

TEST(CsvTest, ColumnOrderFollowsSchema) {
  Dataset ds = FromCsv(SexAgeSchema(), "AGE,SEX\n40,2\n");
  EXPECT_EQ(ds.at(0, 0), 1);
  EXPECT_EQ(ds.at(0, 1), 40);
}

TEST(CsvTest, QuotedFields) {
  std::istringstream in("a,b\n\"x,y\",\"he said \"\"hi\"\"\"\r\n\"multi\nline\",z\n");
  CsvReader reader(in);
  std::vector<std::string> rec;
  ASSERT_TRUE(reader.Next(rec));
  ASSERT_TRUE(reader.Next(rec));
  ASSERT_EQ(rec.size(), 2u);
  EXPECT_EQ(rec[0], "x,y");
  EXPECT_EQ(rec[1], "he said \"hi\"");
  ASSERT_TRUE(reader.Next(rec));
  EXPECT_EQ(rec[0], "multi\nline");
  EXPECT_EQ(reader.record_number(), 3);
  EXPECT_FALSE(reader.Next(rec));
  EXPECT_EQ(CsvEscape("x,y"), "\"x,y\"");
  EXPECT_EQ(CsvEscape("plain"), "plain");
}

TEST(CsvTest, WriteReadRoundTrip) {
  auto schema = MakeSchema({VariableSpec::Categorical("C", {"a b", "c,d"}, true),
                            VariableSpec::Integer("N", -5, 5, true)});
  Dataset ds(schema, {{0, 1, 2, 0}, {-5, 5, kMissingInteger, 0}});
  const std::string text = ToCsvString(ds);
  Dataset back = FromCsv(schema, text);
  EXPECT_EQ(ToCsvString(back), text);
  for (size_t c = 0; c < 2; ++c) {
    for (size_t r = 0; r < 4; ++r) EXPECT_EQ(back.at(r, c), ds.at(r, c));
  }
}

TEST(CsvTest, ShippedCorpusLoads) {
  const auto dir = testing::SourceDir() / "data";
  auto schema = std::make_shared<const Schema>(
      LoadSchemaFile((dir / "simsars_schema.json").string()));
  Dataset ds = LoadCsv((dir / "simsars.csv").string(), schema);
  std::ifstream in(dir / "simsars.csv");
  size_t lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(ds.n_rows(), lines - 1);
  EXPECT_EQ(ds.n_cols(), 12u);
}

TEST(InferSchemaTest, SortsCategoriesAndHonorsHints) {
  std::istringstream in("C,N\nb,5\na,2\nb,9\n");
  Schema s = InferSchema(in, {"N"});
  const VariableSpec& c = s.variable("C");
  ASSERT_TRUE(c.is_categorical());
  EXPECT_EQ(c.categories, (std::vector<std::string>{"a", "b"}));
  const VariableSpec& n = s.variable("N");
  ASSERT_TRUE(n.is_integer());
  EXPECT_EQ(n.min, 2);
  EXPECT_EQ(n.max, 9);
  EXPECT_FALSE(n.missing_allowed);
}

TEST(InferSchemaTest, EmptyCellsBecomeMissing) {
  std::istringstream in("C,N\n,5\na,\n");
  Schema s = InferSchema(in, {"N"});
  EXPECT_TRUE(s.variable("C").missing_allowed);
  EXPECT_TRUE(s.variable("N").missing_allowed);
}

TEST(InferSchemaTest, NoRowsIsEmptyData) {
  std::istringstream in("C,N\n");
  try {
    InferSchema(in, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyData);
  }
}

TEST(CrosstabTest, Univariate) {
  auto schema = MakeSchema({VariableSpec::Categorical("SEX", {"1", "2"})});
  Dataset ds(schema, {{0, 0, 1, 0}});
  ContingencyTable t = Crosstab(ds, {"SEX"});
  EXPECT_EQ(t.total, 4);
  EXPECT_EQ(t.count({0}), 3);
  EXPECT_EQ(t.count({1}), 1);
}

TEST(CrosstabTest, Bivariate) {
  auto schema = MakeSchema({VariableSpec::Categorical("SEX", {"1", "2"}),
                            VariableSpec::Categorical("LTILL", {"y", "n"})});
  Dataset ds(schema, {{0, 0, 1}, {0, 1, 0}});
  ContingencyTable t = Crosstab(ds, {"SEX", "LTILL"});
  EXPECT_EQ(t.cells.size(), 3u);
  EXPECT_EQ(t.count({0, 0}), 1);
  EXPECT_EQ(t.count({0, 1}), 1);
  EXPECT_EQ(t.count({1, 0}), 1);
  EXPECT_EQ(t.count({1, 1}), 0);
  EXPECT_EQ(t.cell_space(), 4);
}

TEST(CrosstabTest, IntegerBinsAnchoredAtMinimum) {
  auto schema = MakeSchema({VariableSpec::Integer("AGE", 0, 95, true)});
  Dataset ds(schema, {{3, 7, 12}});
  ContingencyTable t = Crosstab(ds, {"AGE"}, BinPolicy{5});
  const VariableSpec& age = schema->variable(0);
  ASSERT_EQ(t.cells.size(), 3u);
  // Hand-computed edges: 3 in [0,5), 7 in [5,10), 12 in [10,15).
  EXPECT_EQ(t.count({0}), 1);
  EXPECT_EQ(t.count({1}), 1);
  EXPECT_EQ(t.count({2}), 1);
  EXPECT_EQ(LevelLabel(age, BinPolicy{5}, 0), "[0,5)");
  EXPECT_EQ(LevelLabel(age, BinPolicy{5}, 2), "[10,15)");
  // 96 values in 20 bins plus one missing level.
  EXPECT_EQ(LevelCount(age, BinPolicy{5}), 21);
  EXPECT_EQ(LevelCode(age, BinPolicy{5}, kMissingInteger), 20);
  EXPECT_EQ(LevelLabel(age, BinPolicy{5}, 20), "NA");
}

TEST(CrosstabTest, RejectsBadArity) {
  auto schema = MakeSchema({VariableSpec::Categorical("A", {"1"})});
  Dataset ds(schema, {{0}});
  EXPECT_THROW(Crosstab(ds, {}), Error);
  EXPECT_THROW(Crosstab(ds, {"A", "A", "A"}), Error);
}

TEST(DatasetTest, SelectAndConcat) {
  auto schema = MakeSchema({VariableSpec::Categorical("A", {"x", "y"})});
  Dataset ds(schema, {{0, 1, 1}});
  std::vector<size_t> rows = {2, 2, 0};
  Dataset sel = ds.SelectRows(rows);
  EXPECT_EQ(sel.n_rows(), 3u);
  EXPECT_EQ(sel.at(2, 0), 0);
  Dataset both = ConcatRows(ds, sel);
  EXPECT_EQ(both.n_rows(), 6u);
  auto other = MakeSchema({VariableSpec::Categorical("A", {"x", "z"})});
  Dataset ds2(other, {{0}});
  EXPECT_THROW(ConcatRows(ds, ds2), Error);
  EXPECT_THROW(Dataset(schema, {{0, 2}}), Error);
}

}  // namespace
}  // namespace rutk
