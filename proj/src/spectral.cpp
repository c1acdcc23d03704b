#include "ergo/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "ergo/errors.hpp"

namespace ergo {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t coeff_count(int dim, int order) {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(order + 1);
  return n;
}

void require_order(int order) {
  if (order < 0) throw std::invalid_argument("order must be >= 0");
}

void require_index(const Domain& domain, std::span<const int> k) {
  if (static_cast<int>(k.size()) != domain.dim()) {
    throw std::invalid_argument("multi-index dimension mismatch");
  }
  for (int ki : k) {
    if (ki < 0) throw std::invalid_argument("multi-index entries must be >= 0");
  }
}

// Per-axis normalizer: h_axis(0) = sqrt(L), h_axis(k>0) = sqrt(L/2). The full
// normalizer h_k is the product over axes, giving unit L2 norm on the box.
double axis_norm(double extent, int k) {
  return std::sqrt(k == 0 ? extent : extent / 2.0);
}

}  // namespace

double basis_norm(const Domain& domain, std::span<const int> k) {
  require_index(domain, k);
  double h = 1.0;
  for (int a = 0; a < domain.dim(); ++a) h *= axis_norm(domain.extent(a), k[a]);
  return h;
}

double basis_eval(const Domain& domain, std::span<const int> k,
                  std::span<const double> x) {
  require_index(domain, k);
  require_dim(domain, x, "basis_eval point");
  double value = 1.0;
  for (int a = 0; a < domain.dim(); ++a) {
    const double t = (x[a] - domain.lower(a)) / domain.extent(a);
    value *= std::cos(k[a] * kPi * t) / axis_norm(domain.extent(a), k[a]);
  }
  return value;
}

std::vector<double> basis_grad(const Domain& domain, std::span<const int> k,
                               std::span<const double> x) {
  require_index(domain, k);
  require_dim(domain, x, "basis_grad point");
  const int s = domain.dim();
  std::vector<double> cosv(s), dcos(s);
  for (int a = 0; a < s; ++a) {
    const double L = domain.extent(a);
    const double arg = k[a] * kPi * (x[a] - domain.lower(a)) / L;
    const double h = axis_norm(L, k[a]);
    cosv[a] = std::cos(arg) / h;
    dcos[a] = -(k[a] * kPi / L) * std::sin(arg) / h;
  }
  std::vector<double> grad(s);
  for (int a = 0; a < s; ++a) {
    double g = dcos[a];
    for (int b = 0; b < s; ++b) {
      if (b != a) g *= cosv[b];
    }
    grad[a] = g;
  }
  return grad;
}

double default_weight_exponent(int dim) { return (dim + 1) / 2.0; }

std::vector<double> frequency_weights(int dim, int order, double exponent) {
  require_order(order);
  if (dim <= 0) throw std::invalid_argument("dimension must be positive");
  // Row-major in the multi-index, last axis fastest.
  std::vector<double> w(coeff_count(dim, order));
  std::vector<int> k(dim, 0);
  for (std::size_t flat = 0; flat < w.size(); ++flat) {
    double norm_sq = 0.0;
    for (int ki : k) norm_sq += static_cast<double>(ki) * ki;
    w[flat] = std::pow(1.0 + norm_sq, -exponent);
    for (int a = dim - 1; a >= 0; --a) {
      if (++k[a] <= order) break;
      k[a] = 0;
    }
  }
  return w;
}

CoefficientSet::CoefficientSet(Domain domain, int order,
                               std::vector<double> coeffs,
                               std::vector<double> weights)
    : domain_(std::move(domain)),
      order_(order),
      coeffs_(std::move(coeffs)),
      weights_(std::move(weights)) {
  require_order(order_);
  const std::size_t n = coeff_count(domain_.dim(), order_);
  if (coeffs_.size() != n || weights_.size() != n) {
    throw std::invalid_argument(fmt::format(
        "coefficient set needs {} entries, got {} coeffs / {} weights", n,
        coeffs_.size(), weights_.size()));
  }
  for (double c : coeffs_) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument("coefficient set has non-finite entries");
    }
  }
  // Weights must be positive and non-increasing in the frequency norm |k|.
  std::map<double, std::pair<double, double>> by_norm;  // norm^2 -> (min, max)
  std::vector<int> k(domain_.dim(), 0);
  for (std::size_t flat = 0; flat < weights_.size(); ++flat) {
    const double w = weights_[flat];
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("weights must be positive and finite");
    }
    double norm_sq = 0.0;
    for (int ki : k) norm_sq += static_cast<double>(ki) * ki;
    auto [it, fresh] = by_norm.try_emplace(norm_sq, std::make_pair(w, w));
    if (!fresh) {
      it->second.first = std::min(it->second.first, w);
      it->second.second = std::max(it->second.second, w);
    }
    for (int a = domain_.dim() - 1; a >= 0; --a) {
      if (++k[a] <= order_) break;
      k[a] = 0;
    }
  }
  double prev_min = std::numeric_limits<double>::infinity();
  for (const auto& [norm_sq, mm] : by_norm) {
    if (mm.second > prev_min) {
      throw std::invalid_argument(
          "weights must be non-increasing in the frequency norm");
    }
    prev_min = mm.first;
  }
}

std::size_t CoefficientSet::index_of(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != dim()) {
    throw std::invalid_argument("multi-index dimension mismatch");
  }
  std::size_t flat = 0;
  for (int a = 0; a < dim(); ++a) {
    if (k[a] < 0 || k[a] > order_) {
      throw std::invalid_argument("multi-index entry out of range");
    }
    flat = flat * static_cast<std::size_t>(order_ + 1) +
           static_cast<std::size_t>(k[a]);
  }
  return flat;
}

std::vector<int> CoefficientSet::multi_index(std::size_t flat) const {
  std::vector<int> k(dim());
  for (int a = dim() - 1; a >= 0; --a) {
    k[a] = static_cast<int>(flat % static_cast<std::size_t>(order_ + 1));
    flat /= static_cast<std::size_t>(order_ + 1);
  }
  return k;
}

bool CoefficientSet::compatible(const CoefficientSet& other) const {
  return domain_ == other.domain_ && order_ == other.order_ &&
         weights_ == other.weights_;
}

namespace {

// Cosine table for one axis: row k holds cos(k*pi*(i+0.5)/res)/h_axis(k)
// for each cell i. Midpoint abscissae make the rows discretely orthogonal,
// so projecting and reconstructing on the same grid inverts exactly for
// frequencies below the grid resolution.
std::vector<double> axis_cos_table(double extent, int res, int order) {
  std::vector<double> table(static_cast<std::size_t>(order + 1) * res);
  for (int k = 0; k <= order; ++k) {
    const double h = axis_norm(extent, k);
    for (int i = 0; i < res; ++i) {
      table[static_cast<std::size_t>(k) * res + i] =
          std::cos(k * kPi * (i + 0.5) / res) / h;
    }
  }
  return table;
}

// Contract axis `axis` of `tensor` (shape `dims`, axis 0 fastest) with the
// matrix M (new_dim x dims[axis], row-major), producing the tensor with
// dims[axis] replaced by new_dim.
std::vector<double> contract_axis(const std::vector<double>& tensor,
                                  std::vector<int>& dims, int axis,
                                  const std::vector<double>& matrix,
                                  int new_dim) {
  std::size_t stride = 1;
  for (int a = 0; a < axis; ++a) stride *= static_cast<std::size_t>(dims[a]);
  const std::size_t old_dim = static_cast<std::size_t>(dims[axis]);
  std::size_t outer = 1;
  for (std::size_t a = axis + 1; a < dims.size(); ++a) {
    outer *= static_cast<std::size_t>(dims[a]);
  }
  std::vector<double> out(stride * static_cast<std::size_t>(new_dim) * outer,
                          0.0);
  for (std::size_t o = 0; o < outer; ++o) {
    const std::size_t in_base = o * stride * old_dim;
    const std::size_t out_base = o * stride * static_cast<std::size_t>(new_dim);
    for (int kn = 0; kn < new_dim; ++kn) {
      const double* mrow = matrix.data() + static_cast<std::size_t>(kn) * old_dim;
      double* orow = out.data() + out_base + static_cast<std::size_t>(kn) * stride;
      for (std::size_t i = 0; i < old_dim; ++i) {
        const double m = mrow[i];
        const double* irow = tensor.data() + in_base + i * stride;
        for (std::size_t off = 0; off < stride; ++off) {
          orow[off] += m * irow[off];
        }
      }
    }
  }
  dims[axis] = new_dim;
  return out;
}

// Reverse the axis order of a tensor with equal dims (n per axis), converting
// between cell layout (axis 0 fastest) and coefficient layout (last axis
// fastest). Self-inverse.
std::vector<double> reverse_axes(const std::vector<double>& tensor, int dim,
                                 int n) {
  if (dim == 1) return tensor;
  std::vector<double> out(tensor.size());
  std::vector<int> idx(dim, 0);
  for (std::size_t flat = 0; flat < tensor.size(); ++flat) {
    // idx[0] is the fastest axis of `flat`; give it the slowest slot of the
    // output index (and vice versa) to swap the two layout conventions.
    std::size_t rflat = 0;
    for (int a = 0; a < dim; ++a) {
      rflat = rflat * static_cast<std::size_t>(n) +
              static_cast<std::size_t>(idx[a]);
    }
    out[rflat] = tensor[flat];
    for (int a = 0; a < dim; ++a) {
      if (++idx[a] < n) break;
      idx[a] = 0;
    }
  }
  return out;
}

CoefficientSet make_set(const Domain& domain, int order,
                        std::vector<double> coeffs,
                        std::optional<double> weight_exponent) {
  const double exponent =
      weight_exponent.value_or(default_weight_exponent(domain.dim()));
  return CoefficientSet(domain, order, std::move(coeffs),
                        frequency_weights(domain.dim(), order, exponent));
}

}  // namespace

CoefficientSet decompose_field(const RawField& field, int order,
                               std::optional<double> weight_exponent) {
  require_order(order);
  const GridShape& shape = field.shape;
  const Domain& domain = shape.domain();
  const int s = domain.dim();

  // Successive per-axis contractions of the value tensor with the cosine
  // tables: cost O(cells * K) per axis instead of O(cells * K^s) naive.
  std::vector<double> tensor = field.values;
  std::vector<int> dims = shape.resolution();
  for (int a = 0; a < s; ++a) {
    const auto table = axis_cos_table(domain.extent(a), shape.resolution()[a],
                                      order);
    tensor = contract_axis(tensor, dims, a, table, order + 1);
  }
  // Quadrature measure, then flip to coefficient layout.
  const double vol = shape.cell_volume();
  for (double& c : tensor) c *= vol;
  tensor = reverse_axes(tensor, s, order + 1);
  return make_set(domain, order, std::move(tensor), weight_exponent);
}

CoefficientSet decompose_field(const DensityField& field, int order,
                               std::optional<double> weight_exponent) {
  return decompose_field(field.raw(), order, weight_exponent);
}

CoefficientSet decompose_points(const std::vector<std::vector<double>>& points,
                                const Domain& domain, int order,
                                std::optional<double> weight_exponent) {
  require_order(order);
  if (points.empty()) {
    throw std::invalid_argument("cannot decompose an empty point set");
  }
  const int s = domain.dim();
  const int n1 = order + 1;
  std::vector<double> coeffs(coeff_count(s, order), 0.0);
  std::vector<std::vector<double>> axis(s, std::vector<double>(n1));
  for (const auto& p : points) {
    require_inside(domain, p, "spectral point");
    for (int a = 0; a < s; ++a) {
      const double t = (p[a] - domain.lower(a)) / domain.extent(a);
      for (int k = 0; k < n1; ++k) {
        axis[a][k] = std::cos(k * kPi * t) / axis_norm(domain.extent(a), k);
      }
    }
    // Accumulate the separable outer product in coefficient layout
    // (last axis fastest); the innermost axis is a tight fused loop.
    auto accumulate = [&](auto&& self, int a, std::size_t base,
                          double prod) -> void {
      if (a == s - 1) {
        double* dst = coeffs.data() + base * static_cast<std::size_t>(n1);
        const double* ax = axis[a].data();
        for (int k = 0; k < n1; ++k) dst[k] += prod * ax[k];
        return;
      }
      for (int k = 0; k < n1; ++k) {
        self(self, a + 1, base * static_cast<std::size_t>(n1) + k,
             prod * axis[a][k]);
      }
    };
    accumulate(accumulate, 0, 0, 1.0);
  }
  const double inv_n = 1.0 / static_cast<double>(points.size());
  for (double& c : coeffs) c *= inv_n;
  return make_set(domain, order, std::move(coeffs), weight_exponent);
}

CoefficientSet decompose_trajectory(const Trajectory& traj, int order,
                                    std::optional<double> weight_exponent) {
  if (traj.steps() < 1) {
    throw std::invalid_argument("trajectory has no steps to decompose");
  }
  std::vector<std::vector<double>> points(traj.states().begin() + 1,
                                          traj.states().end());
  return decompose_points(points, traj.domain(), order, weight_exponent);
}

RawField reconstruct_field(const CoefficientSet& coeffs,
                           const std::vector<int>& resolution) {
  const Domain& domain = coeffs.domain();
  const int s = domain.dim();
  if (static_cast<int>(resolution.size()) != s) {
    throw std::invalid_argument("reconstruction resolution dimension mismatch");
  }
  GridShape shape(domain, resolution);
  // Coefficient layout -> cell layout, then expand axis by axis with the
  // transposed cosine tables.
  std::vector<double> tensor = reverse_axes(coeffs.coeffs(), s,
                                            coeffs.order() + 1);
  std::vector<int> dims(s, coeffs.order() + 1);
  for (int a = 0; a < s; ++a) {
    const int res = resolution[a];
    const auto table = axis_cos_table(domain.extent(a), res, coeffs.order());
    // Transpose: row i holds F contributions of every k at cell i.
    std::vector<double> tr(static_cast<std::size_t>(res) *
                           (coeffs.order() + 1));
    for (int k = 0; k <= coeffs.order(); ++k) {
      for (int i = 0; i < res; ++i) {
        tr[static_cast<std::size_t>(i) * (coeffs.order() + 1) + k] =
            table[static_cast<std::size_t>(k) * res + i];
      }
    }
    tensor = contract_axis(tensor, dims, a, tr, res);
  }
  return RawField(std::move(shape), std::move(tensor));
}

void write_coefficients_csv(const std::filesystem::path& path,
                            const CoefficientSet& coeffs,
                            const std::string& comment) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write coefficient CSV " + path.string());
  }
  if (!comment.empty()) out << "# " << comment << '\n';
  for (int a = 0; a < coeffs.dim(); ++a) out << fmt::format("k{},", a + 1);
  out << "coeff,weight\n";
  for (std::size_t flat = 0; flat < coeffs.size(); ++flat) {
    const auto k = coeffs.multi_index(flat);
    for (int ka : k) out << ka << ',';
    out << fmt::format("{},{}\n", coeffs.coeff(flat), coeffs.weight(flat));
  }
}

CoefficientSet read_coefficients_csv(const std::filesystem::path& path,
                                     const Domain& domain) {
  std::ifstream in(path);
  if (!in) {
    throw parse_error("cannot open coefficient CSV " + path.string(), 0);
  }
  const int s = domain.dim();
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  struct Row {
    std::vector<int> k;
    double coeff;
    double weight;
  };
  std::vector<Row> rows;
  int order = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      saw_header = true;
      continue;
    }
    std::istringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (static_cast<int>(cells.size()) != s + 2) {
      throw parse_error(fmt::format("expected {} columns", s + 2), line_no);
    }
    Row row;
    try {
      for (int a = 0; a < s; ++a) {
        row.k.push_back(std::stoi(cells[a]));
        if (row.k.back() < 0) throw parse_error("negative index", line_no);
        order = std::max(order, row.k.back());
      }
      row.coeff = std::stod(cells[s]);
      row.weight = std::stod(cells[s + 1]);
    } catch (const std::invalid_argument&) {
      throw parse_error("malformed numeric value", line_no);
    } catch (const std::out_of_range&) {
      throw parse_error("numeric value out of range", line_no);
    }
    rows.push_back(std::move(row));
  }
  const std::size_t expected = coeff_count(s, order);
  if (rows.size() != expected) {
    throw parse_error(
        fmt::format("incomplete coefficient set: {} rows, expected {}",
                    rows.size(), expected),
        line_no);
  }
  std::vector<double> coeffs(expected), weights(expected);
  std::vector<bool> seen(expected, false);
  // Any row order is accepted; indices are recomputed from the k columns.
  CoefficientSet probe(domain, order, std::vector<double>(expected, 0.0),
                       std::vector<double>(expected, 1.0));
  for (const auto& row : rows) {
    const std::size_t flat = probe.index_of(row.k);
    if (seen[flat]) throw parse_error("duplicate multi-index row", 0);
    seen[flat] = true;
    coeffs[flat] = row.coeff;
    weights[flat] = row.weight;
  }
  return CoefficientSet(domain, order, std::move(coeffs), std::move(weights));
}

}  // namespace ergo
