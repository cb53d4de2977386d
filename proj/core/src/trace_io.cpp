#include <ostream>

#include "retlab/averages.hpp"

namespace retlab {

void write_traces_csv(std::ostream& out, const std::vector<AverageTrace>& traces) {
  out << "scheme,seed,x_id,N,re,im,reference_re,reference_im\n";
  for (const auto& t : traces) {
    for (std::size_t i = 0; i < t.grid.size(); ++i) {
      out << to_string(t.scheme) << ',' << t.seed << ',' << t.x_id << ',' << t.grid[i] << ','
          << format_double(t.values[i].real()) << ',' << format_double(t.values[i].imag()) << ',';
      if (i < t.reference.size()) {
        out << format_double(t.reference[i].real()) << ',' << format_double(t.reference[i].imag());
      } else if (t.limit) {
        out << format_double(t.limit->real()) << ',' << format_double(t.limit->imag());
      } else {
        out << ',';
      }
      out << '\n';
    }
  }
}

}  // namespace retlab
