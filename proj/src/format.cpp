#include "hjbfem/format.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "hjbfem/errors.hpp"

namespace hjb {

std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw InputError("cannot format value");
    return std::string(buf, end);
}

double parse_double(std::string_view text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw InputError("not a number: '" + std::string(text) + "'");
    }
    return value;
}

UnfixableRowError::UnfixableRowError(std::size_t row, int column, double b_entry, double k_entry)
    : Error("row " + std::to_string(row) + ", column " + std::to_string(column) +
            ": positive off-diagonal " + format_double(b_entry) +
            " cannot be corrected by diffusion (stiffness entry " + format_double(k_entry) +
            " is not negative; mesh not strictly acute along this edge)"),
      row_(row), column_(column) {}

CflError::CflError(int step, double h, double h_max)
    : Error("CFL violation at step " + std::to_string(step) + ": h = " + format_double(h) +
            " exceeds h_max = " + format_double(h_max)),
      step_(step), h_(h), h_max_(h_max) {}

}  // namespace hjb
