#include "optcast/market_data.hpp"

#include <array>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <istream>
#include <sstream>

namespace optcast {

namespace {

constexpr const char* kHeader =
    "date,opt_bid,opt_ask,opt_last,impl_vol,stock_bid,stock_ask,stock_last";

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static constexpr int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lengths[m - 1];
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

double parse_field(const std::string& text, const char* name, int line_no) {
    double value = 0;
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        throw DataError("line " + std::to_string(line_no) + ": field '" + name +
                        "' is not a finite number: '" + text + "'");
    }
    return value;
}

void check_record(const DailyRecord& r) {
    const std::string where = " on " + to_string(r.date);
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0))
            throw DataError(std::string(name) + " must be positive" + where);
    };
    positive(r.opt_bid, "opt_bid");
    positive(r.opt_ask, "opt_ask");
    positive(r.opt_last, "opt_last");
    positive(r.impl_vol, "impl_vol");
    positive(r.stock_bid, "stock_bid");
    positive(r.stock_ask, "stock_ask");
    positive(r.stock_last, "stock_last");
    if (!(r.opt_bid < r.opt_ask))
        throw DataError("crossed or zero-width option market (opt_bid >= opt_ask)" + where);
    if (!(r.stock_bid < r.stock_ask))
        throw DataError("crossed or zero-width stock market (stock_bid >= stock_ask)" + where);
}

void append_number(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // Trim to the shortest representation that still round-trips.
    for (int prec = 1; prec < 17; ++prec) {
        char probe[32];
        std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
        double back = 0;
        std::from_chars(probe, probe + std::char_traits<char>::length(probe), back);
        if (back == v) {
            out += probe;
            return;
        }
    }
    out += buf;
}

}  // namespace

Date parse_date(const std::string& text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw DataError("malformed date '" + text + "' (expected YYYY-MM-DD)");
    auto digits = [&](int from, int count) {
        int value = 0;
        for (int i = from; i < from + count; ++i) {
            char c = text[i];
            if (c < '0' || c > '9')
                throw DataError("malformed date '" + text + "' (expected YYYY-MM-DD)");
            value = value * 10 + (c - '0');
        }
        return value;
    };
    Date d{digits(0, 4), digits(5, 2), digits(8, 2)};
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month))
        throw DataError("invalid calendar date '" + text + "'");
    return d;
}

std::string to_string(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

OptionHistory parse_history(std::istream& in, std::string option_id) {
    OptionHistory history;
    history.option_id = std::move(option_id);

    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw DataError("empty input");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader)
        throw DataError("line 1: bad header, expected '" + std::string(kHeader) + "'");

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        auto fields = split_fields(line);
        if (fields.size() != 8)
            throw DataError("line " + std::to_string(line_no) + ": expected 8 fields, got " +
                            std::to_string(fields.size()));

        DailyRecord r;
        r.date = parse_date(fields[0]);
        r.opt_bid = parse_field(fields[1], "opt_bid", line_no);
        r.opt_ask = parse_field(fields[2], "opt_ask", line_no);
        r.opt_last = parse_field(fields[3], "opt_last", line_no);
        r.impl_vol = parse_field(fields[4], "impl_vol", line_no);
        r.stock_bid = parse_field(fields[5], "stock_bid", line_no);
        r.stock_ask = parse_field(fields[6], "stock_ask", line_no);
        r.stock_last = parse_field(fields[7], "stock_last", line_no);
        check_record(r);

        if (!history.records.empty() && !(history.records.back().date < r.date))
            throw DataError("line " + std::to_string(line_no) +
                            ": dates must be strictly increasing (saw " + to_string(r.date) +
                            " after " + to_string(history.records.back().date) + ")");
        history.records.push_back(r);
    }

    if (history.records.size() < 3)
        throw DataError("history has " + std::to_string(history.records.size()) +
                        " rows; a forecast window needs at least 3");
    return history;
}

std::string to_csv(const OptionHistory& history) {
    std::string out = kHeader;
    out += '\n';
    for (const auto& r : history.records) {
        out += to_string(r.date);
        for (double v : {r.opt_bid, r.opt_ask, r.opt_last, r.impl_vol,
                         r.stock_bid, r.stock_ask, r.stock_last}) {
            out += ',';
            append_number(out, v);
        }
        out += '\n';
    }
    return out;
}

Window window_at(const OptionHistory& history, std::size_t index) {
    if (index < 2 || index >= history.records.size())
        throw std::out_of_range("window_at: index " + std::to_string(index) +
                                " needs 2 prior days and must lie inside the history (size " +
                                std::to_string(history.records.size()) + ")");
    return Window{history.records[index - 2], history.records[index - 1],
                  history.records[index]};
}

}  // namespace optcast
