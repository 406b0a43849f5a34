#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "fbh/report.hpp"

using namespace fbh::report;

TEST(FormatDouble, RoundTrips)
{
    for (double v : {0.1, 1.0 / 3.0, 6.0, -2.5e-300, 1e300, std::nextafter(1.0, 2.0)}) {
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.125), "0.125");
    EXPECT_EQ(format_double(6.0), "6");
    EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Csv, EscapesPerRfc4180)
{
    EXPECT_EQ(csv_escape("plain"), "plain");
    EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv_escape("two\nlines"), "\"two\nlines\"");
}

TEST(Csv, TableLayout)
{
    Table t({"name", "value", "flag", "count", "note"});
    t.add_row({std::string("x,y"), 0.5, true, std::int64_t{3}, std::monostate{}});
    std::ostringstream os;
    t.write_csv(os);
    EXPECT_EQ(os.str(), "name,value,flag,count,note\r\n\"x,y\",0.5,true,3,\r\n");
    EXPECT_THROW(t.add_row({1.0}), std::invalid_argument);
}

TEST(Json, RoundTripsThroughSchemaCheck)
{
    Table t({"t", "epsilon", "balanced", "note"});
    t.add_row({0.0, 6.0, true, std::monostate{}});
    t.add_row({0.9, 1.0 / 3.0, false, std::string("a \"quoted\" note")});
    std::ostringstream os;
    t.write_json(os);
    const auto doc = nlohmann::ordered_json::parse(os.str());
    EXPECT_TRUE(matches_table_schema(doc));
    EXPECT_EQ(doc["rows"][1]["epsilon"].get<double>(), 1.0 / 3.0);
    EXPECT_TRUE(doc["rows"][0]["note"].is_null());
    EXPECT_EQ(doc["rows"][1]["note"].get<std::string>(), "a \"quoted\" note");
}

TEST(Json, SchemaRejectsMalformedDocuments)
{
    EXPECT_FALSE(matches_table_schema(nlohmann::ordered_json::parse(R"({"rows": []})")));
    EXPECT_FALSE(matches_table_schema(nlohmann::ordered_json::parse(R"({"columns": ["a"], "rows": [{"b": 1}]})")));
    EXPECT_FALSE(matches_table_schema(nlohmann::ordered_json::parse(R"({"columns": ["a"], "rows": [{"a": [1]}]})")));
    EXPECT_TRUE(matches_table_schema(nlohmann::ordered_json::parse(R"({"columns": ["a"], "rows": [{"a": null}]})")));
}
