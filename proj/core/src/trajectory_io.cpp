#include <array>
#include <charconv>
#include <ostream>
#include <string_view>

#include "holderbt/descent.hpp"
#include "holderbt/minimax.hpp"

namespace holderbt {
namespace {

// Shortest round-trip representation, independent of stream locale/state.
template <class T>
std::string_view format(std::array<char, 32>& buf, T value) {
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return ec == std::errc() ? std::string_view(buf.data(), ptr - buf.data()) : "nan";
}

template <class Record>
void write_row(std::ostream& out, const Record& r, double value, double grad_norm) {
  std::array<char, 32> buf{};
  out << format(buf, r.n) << ',';
  out << format(buf, r.oracle_calls) << ',';
  out << format(buf, value) << ',';
  out << format(buf, grad_norm) << ',';
  out << format(buf, r.step) << ',';
  out << format(buf, r.k) << '\n';
}

}  // namespace

void write_csv(std::ostream& out, const Trajectory& traj) {
  out << "n,oracle_calls,f,grad_norm,step,k\n";
  for (const auto& r : traj.records) write_row(out, r, r.f_value, r.grad_norm);
}

void write_csv(std::ostream& out, const MinMaxTrajectory& traj) {
  out << "n,oracle_calls,L,grad_x_norm,step,k\n";
  for (const auto& r : traj.records) write_row(out, r, r.loss, r.grad_x_norm);
}

}  // namespace holderbt
