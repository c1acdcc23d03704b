#include "ergo/domain.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ergo/errors.hpp"

namespace ergo {

Domain::Domain(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size()) {
    throw std::invalid_argument("domain bounds must be nonempty and equal length");
  }
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) ||
        !(lower_[i] < upper_[i])) {
      throw std::invalid_argument("domain axis " + std::to_string(i) +
                                  ": lower bound must be finite and < upper");
    }
  }
}

double Domain::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= extent(a);
  return v;
}

bool Domain::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  for (int a = 0; a < dim(); ++a) {
    if (x[a] < lower_[a] || x[a] > upper_[a]) return false;
  }
  return true;
}

void require_dim(const Domain& domain, std::span<const double> x,
                 const char* what) {
  if (static_cast<int>(x.size()) != domain.dim()) {
    throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                std::to_string(domain.dim()) + ", got " +
                                std::to_string(x.size()));
  }
}

void require_inside(const Domain& domain, std::span<const double> x,
                    const char* what) {
  require_dim(domain, x, what);
  if (!domain.contains(x)) {
    std::string coords;
    for (double v : x) coords += " " + std::to_string(v);
    throw domain_violation(std::string(what) + ": point" + coords +
                           " is outside the domain");
  }
}

}  // namespace ergo
