#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "test_common.hpp"

using namespace optcast;
using namespace optcast::test;

namespace {

const char* kGoodCsv =
    "date,opt_bid,opt_ask,opt_last,impl_vol,stock_bid,stock_ask,stock_last\n"
    "2024-03-04,1.05,1.10,1.07,0.25,99.50,100.50,100.00\n"
    "2024-03-05,1.06,1.12,1.09,0.26,99.60,100.60,100.10\n"
    "2024-03-06,1.08,1.14,1.11,0.24,99.70,100.70,100.20\n";

}  // namespace

TEST_CASE("header plus three well-formed rows parse") {
    OptionHistory h = parse_csv_text(kGoodCsv, "OPT1");
    CHECK(h.option_id == "OPT1");
    REQUIRE(h.size() == 3);
    CHECK(h.records[0].date == parse_date("2024-03-04"));
    CHECK(h.records[0].opt_bid == 1.05);
    CHECK(h.records[2].stock_last == 100.20);
}

TEST_CASE("crossed option market is rejected and names the date") {
    const char* csv =
        "date,opt_bid,opt_ask,opt_last,impl_vol,stock_bid,stock_ask,stock_last\n"
        "2024-03-04,1.05,1.10,1.07,0.25,99.50,100.50,100.00\n"
        "2024-03-05,1.10,1.05,1.07,0.25,99.50,100.50,100.00\n"
        "2024-03-06,1.05,1.10,1.07,0.25,99.50,100.50,100.00\n";
    try {
        parse_csv_text(csv);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("2024-03-05") != std::string::npos);
        CHECK(std::string(e.what()).find("opt_bid") != std::string::npos);
    }
}

TEST_CASE("zero implied volatility is rejected") {
    const char* csv =
        "date,opt_bid,opt_ask,opt_last,impl_vol,stock_bid,stock_ask,stock_last\n"
        "2024-03-04,1.05,1.10,1.07,0,99.50,100.50,100.00\n"
        "2024-03-05,1.06,1.12,1.09,0.26,99.60,100.60,100.10\n"
        "2024-03-06,1.08,1.14,1.11,0.24,99.70,100.70,100.20\n";
    CHECK_THROWS_WITH_AS(parse_csv_text(csv), doctest::Contains("impl_vol"), DataError);
}

TEST_CASE("fewer than three rows is rejected") {
    const char* csv =
        "date,opt_bid,opt_ask,opt_last,impl_vol,stock_bid,stock_ask,stock_last\n"
        "2024-03-04,1.05,1.10,1.07,0.25,99.50,100.50,100.00\n"
        "2024-03-05,1.06,1.12,1.09,0.26,99.60,100.60,100.10\n";
    CHECK_THROWS_AS(parse_csv_text(csv), DataError);
}

TEST_CASE("malformed numeric field reports its line number") {
    const char* csv =
        "date,opt_bid,opt_ask,opt_last,impl_vol,stock_bid,stock_ask,stock_last\n"
        "2024-03-04,1.05,1.10,1.07,0.25,99.50,100.50,100.00\n"
        "2024-03-05,oops,1.12,1.09,0.26,99.60,100.60,100.10\n"
        "2024-03-06,1.08,1.14,1.11,0.24,99.70,100.70,100.20\n";
    CHECK_THROWS_WITH_AS(parse_csv_text(csv), doctest::Contains("line 3"), DataError);
}

TEST_CASE("wrong header and wrong field counts are rejected") {
    CHECK_THROWS_AS(parse_csv_text("date,opt_bid\n1,2\n"), DataError);
    const char* csv =
        "date,opt_bid,opt_ask,opt_last,impl_vol,stock_bid,stock_ask,stock_last\n"
        "2024-03-04,1.05,1.10,1.07,0.25,99.50,100.50\n";
    CHECK_THROWS_WITH_AS(parse_csv_text(csv), doctest::Contains("8 fields"), DataError);
}

TEST_CASE("empty input and trailing blank lines") {
    CHECK_THROWS_WITH_AS(parse_csv_text(""), doctest::Contains("empty"), DataError);
    OptionHistory h = parse_csv_text(std::string(kGoodCsv) + "\n\n");
    CHECK(h.size() == 3);
}

TEST_CASE("dates must be strictly increasing") {
    const char* csv =
        "date,opt_bid,opt_ask,opt_last,impl_vol,stock_bid,stock_ask,stock_last\n"
        "2024-03-05,1.05,1.10,1.07,0.25,99.50,100.50,100.00\n"
        "2024-03-05,1.06,1.12,1.09,0.26,99.60,100.60,100.10\n"
        "2024-03-06,1.08,1.14,1.11,0.24,99.70,100.70,100.20\n";
    CHECK_THROWS_WITH_AS(parse_csv_text(csv), doctest::Contains("strictly increasing"),
                         DataError);
}

TEST_CASE("date parsing validates the calendar") {
    CHECK(parse_date("2024-02-29") == Date{2024, 2, 29});  // leap year
    CHECK_THROWS_AS(parse_date("2023-02-29"), DataError);
    CHECK_THROWS_AS(parse_date("2024-13-01"), DataError);
    CHECK_THROWS_AS(parse_date("2024-00-10"), DataError);
    CHECK_THROWS_AS(parse_date("2024-3-4"), DataError);
    CHECK_THROWS_AS(parse_date("not-a-date"), DataError);
    CHECK(to_string(Date{2024, 3, 4}) == "2024-03-04");
}

TEST_CASE("serialize and reparse yields an identical history") {
    // Values chosen to be awkward in binary floating point.
    OptionHistory h;
    h.option_id = "RT";
    h.records.push_back(make_record("2024-03-04", 1.05, 1.1, 1.07, 0.253, 99.51, 100.49, 99.97));
    h.records.push_back(
        make_record("2024-03-05", 0.1 + 0.2, 0.9999999999999999, 0.35, 0.2, 99.0, 101.0, 100.0));
    h.records.push_back(
        make_record("2024-03-06", 1.0 / 3.0, 2.0 / 3.0, 0.5, 1e-3, 42.125, 42.375, 42.25));

    OptionHistory back = parse_csv_text(to_csv(h), "RT");
    REQUIRE(back.size() == h.size());
    for (std::size_t k = 0; k < h.size(); ++k) {
        const auto& a = h.records[k];
        const auto& b = back.records[k];
        CHECK(a.date == b.date);
        CHECK(a.opt_bid == b.opt_bid);
        CHECK(a.opt_ask == b.opt_ask);
        CHECK(a.opt_last == b.opt_last);
        CHECK(a.impl_vol == b.impl_vol);
        CHECK(a.stock_bid == b.stock_bid);
        CHECK(a.stock_ask == b.stock_ask);
        CHECK(a.stock_last == b.stock_last);
    }
}

TEST_CASE("window_at maps three consecutive days onto the time stencil") {
    OptionHistory h;
    h.option_id = "W";
    const char* dates[] = {"2024-03-04", "2024-03-05", "2024-03-06", "2024-03-07",
                           "2024-03-08"};
    for (int k = 0; k < 5; ++k)
        h.records.push_back(
            make_record(dates[k], 1.0 + k, 1.1 + k, 1.05 + k, 0.2, 99.0, 101.0, 100.0));

    Window first = window_at(h, 2);
    CHECK(first.day_minus2.date == h.records[0].date);
    CHECK(first.day_minus1.date == h.records[1].date);
    CHECK(first.day_0.date == h.records[2].date);

    Window last = window_at(h, 4);
    CHECK(last.day_minus2.date == h.records[2].date);
    CHECK(last.day_0.date == h.records[4].date);

    CHECK_THROWS_AS(window_at(h, 1), std::out_of_range);
    CHECK_THROWS_AS(window_at(h, 5), std::out_of_range);

    // adjacent windows share exactly two records
    Window w2 = window_at(h, 2);
    Window w3 = window_at(h, 3);
    CHECK(w3.day_minus2.date == w2.day_minus1.date);
    CHECK(w3.day_minus1.date == w2.day_0.date);
    CHECK(w3.day_0.date != w2.day_0.date);
}
