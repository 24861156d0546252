#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace optcast {

/// Input data failed validation or could not be parsed. The message names
/// the offending line/field/date.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Calendar date, ISO-8601 (YYYY-MM-DD) on the wire.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;
};

Date parse_date(const std::string& text);
std::string to_string(const Date& d);

/// One trading day's quotes for an option and its underlying stock.
/// impl_vol is the annualized implied volatility (per sqrt-year).
struct DailyRecord {
    Date date;
    double opt_bid = 0;
    double opt_ask = 0;
    double opt_last = 0;
    double impl_vol = 0;
    double stock_bid = 0;
    double stock_ask = 0;
    double stock_last = 0;
};

/// Full per-option daily history, strictly ascending by date.
struct OptionHistory {
    std::string option_id;
    std::vector<DailyRecord> records;

    std::size_t size() const { return records.size(); }
};

/// Three consecutive trading days mapped onto t = -2*tau, -tau, 0
/// ("the day before yesterday", "yesterday", "today").
struct Window {
    DailyRecord day_minus2;
    DailyRecord day_minus1;
    DailyRecord day_0;
};

/// Parse a quote history from CSV (see README for the column layout).
/// Every record invariant is checked: positive prices and volatility,
/// bid strictly below ask on both legs, dates strictly increasing,
/// at least three rows. Violations throw DataError naming the spot.
OptionHistory parse_history(std::istream& in, std::string option_id = "");

/// Serialize back to the same CSV layout. parse_history(to_csv(h)) == h,
/// including bit-identical numeric fields.
std::string to_csv(const OptionHistory& history);

/// Window ending at `index` (day_0 = records[index]). Requires index >= 2.
Window window_at(const OptionHistory& history, std::size_t index);

}  // namespace optcast
