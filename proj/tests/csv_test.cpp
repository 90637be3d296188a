#include "nrchain/csv.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using nrchain::csv::escape_field;
using nrchain::csv::format_double;
using nrchain::csv::parse_double;
using nrchain::csv::split_line;

TEST(Csv, SplitsPlainFields) {
    auto f = split_line("a,b,,c");
    ASSERT_TRUE(f);
    EXPECT_EQ(*f, (std::vector<std::string>{"a", "b", "", "c"}));
}

TEST(Csv, QuotedFieldsKeepDelimiterAndQuotes) {
    auto f = split_line(R"(1,"x, y","say ""hi""")");
    ASSERT_TRUE(f);
    ASSERT_EQ(f->size(), 3u);
    EXPECT_EQ((*f)[1], "x, y");
    EXPECT_EQ((*f)[2], "say \"hi\"");
}

TEST(Csv, UnterminatedQuoteFails) { EXPECT_FALSE(split_line("a,\"open")); }

TEST(Csv, OtherDelimiter) {
    auto f = split_line("1;2;3", ';');
    ASSERT_TRUE(f);
    EXPECT_EQ(f->size(), 3u);
}

TEST(Csv, EscapeRoundTrip) {
    for (std::string s : {"plain", "a,b", "q\"uote", "line\nbreak", ""}) {
        auto f = split_line(escape_field(s) + ",z");
        ASSERT_TRUE(f) << s;
        EXPECT_EQ((*f)[0], s);
    }
}

TEST(Csv, ParseDouble) {
    EXPECT_EQ(parse_double(" 1.5 "), 1.5);
    EXPECT_EQ(parse_double("-2e3"), -2000.0);
    EXPECT_FALSE(parse_double(""));
    EXPECT_FALSE(parse_double("12abc"));
    EXPECT_FALSE(parse_double("nan"));
    EXPECT_FALSE(parse_double("inf"));
}

TEST(Csv, FormatDoubleRoundTrips) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1e7, 1e7);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng);
        EXPECT_EQ(parse_double(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.5), "0.5");
}
