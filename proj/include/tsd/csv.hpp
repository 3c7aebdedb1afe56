#pragma once

#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace tsd::csv {

// Shortest round-trip-safe text for a double; locale independent.
inline std::string number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class Writer {
public:
    explicit Writer(std::ostream& os) : os_(os) {}

    Writer& comment(std::string_view text) {
        os_ << "# " << text << '\n';
        return *this;
    }

    Writer& header(std::initializer_list<std::string_view> cols) {
        std::vector<std::string> v(cols.begin(), cols.end());
        return header(v);
    }

    Writer& header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) os_ << (i ? "," : "") << cols[i];
        os_ << '\n';
        return *this;
    }

    Writer& row(const std::vector<std::string>& cells) { return header(cells); }

    Writer& row(std::initializer_list<double> values) {
        std::size_t i = 0;
        for (double v : values) os_ << (i++ ? "," : "") << number(v);
        os_ << '\n';
        return *this;
    }

private:
    std::ostream& os_;
};

}  // namespace tsd::csv
