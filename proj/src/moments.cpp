#include "etfspectra/moments.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "etfspectra/manova.hpp"
#include "etfspectra/random.hpp"

namespace etfs {

// ---- RationalPolynomial ----

RationalPolynomial::RationalPolynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

RationalPolynomial RationalPolynomial::constant(const Rational& c) { return RationalPolynomial({c}); }

RationalPolynomial RationalPolynomial::monomial(const Rational& c, int power) {
  std::vector<Rational> coeffs(power + 1);
  coeffs[power] = c;
  return RationalPolynomial(std::move(coeffs));
}

RationalPolynomial RationalPolynomial::x_plus_one_pow(int e) {
  RationalPolynomial base({Rational(1), Rational(1)});
  RationalPolynomial out = constant(1);
  for (int i = 0; i < e; ++i) out = out * base;
  return out;
}

void RationalPolynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational RationalPolynomial::coefficient(int power) const {
  if (power < 0 || power >= static_cast<int>(coeffs_.size())) return Rational(0);
  return coeffs_[power];
}

double RationalPolynomial::evaluate(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + static_cast<double>(*it);
  return acc;
}

RationalPolynomial RationalPolynomial::operator+(const RationalPolynomial& o) const {
  std::vector<Rational> out(std::max(coeffs_.size(), o.coeffs_.size()));
  for (std::size_t i = 0; i < coeffs_.size(); ++i) out[i] += coeffs_[i];
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) out[i] += o.coeffs_[i];
  return RationalPolynomial(std::move(out));
}

RationalPolynomial RationalPolynomial::operator-(const RationalPolynomial& o) const {
  return *this + o.scaled(Rational(-1));
}

RationalPolynomial RationalPolynomial::operator*(const RationalPolynomial& o) const {
  if (coeffs_.empty() || o.coeffs_.empty()) return {};
  std::vector<Rational> out(coeffs_.size() + o.coeffs_.size() - 1);
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    for (std::size_t j = 0; j < o.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * o.coeffs_[j];
  return RationalPolynomial(std::move(out));
}

RationalPolynomial RationalPolynomial::scaled(const Rational& c) const {
  std::vector<Rational> out(coeffs_);
  for (auto& v : out) v *= c;
  return RationalPolynomial(std::move(out));
}

bool RationalPolynomial::operator==(const RationalPolynomial& o) const { return coeffs_ == o.coeffs_; }

// ---- MomentPolynomial ----

MomentPolynomial::MomentPolynomial(int d, std::vector<RationalPolynomial> blocks,
                                   std::vector<std::map<CycleType, std::int64_t>> block_terms)
    : d_(d), blocks_(std::move(blocks)), block_terms_(std::move(block_terms)) {}

const RationalPolynomial& MomentPolynomial::block(int k) const {
  if (k < 1 || k > d_) throw std::out_of_range("block index out of range");
  return blocks_[k - 1];
}

const std::map<CycleType, std::int64_t>& MomentPolynomial::block_terms(int k) const {
  if (k < 1 || k >= d_) throw std::out_of_range("block term index out of range");
  return block_terms_[k - 1];
}

Rational MomentPolynomial::coefficient(int p_power, int x_power) const {
  if (p_power < 1 || p_power > d_) return Rational(0);
  return blocks_[p_power - 1].coefficient(x_power);
}

std::map<std::pair<int, int>, Rational> MomentPolynomial::coefficients() const {
  std::map<std::pair<int, int>, Rational> out;
  for (int k = 1; k <= d_; ++k) {
    const auto& c = blocks_[k - 1].coeffs();
    for (std::size_t j = 0; j < c.size(); ++j)
      if (c[j] != 0) out[{k, static_cast<int>(j)}] = c[j];
  }
  return out;
}

RationalPolynomial MomentPolynomial::at_p_equals_one() const {
  RationalPolynomial sum;
  for (const auto& b : blocks_) sum = sum + b;
  return sum;
}

double MomentPolynomial::evaluate(double p, double x) const {
  double acc = 0.0;
  for (int k = d_; k >= 1; --k) acc = (acc + blocks_[k - 1].evaluate(x)) * p;
  return acc;
}

namespace {

std::string rational_text(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

std::string x_poly_latex(const RationalPolynomial& poly) {
  std::ostringstream os;
  bool first = true;
  for (int j = poly.degree(); j >= 0; --j) {
    Rational c = poly.coefficient(j);
    if (c == 0) continue;
    bool negative = c < 0;
    Rational mag = negative ? Rational(-c) : c;
    if (first)
      os << (negative ? "-" : "");
    else
      os << (negative ? " - " : " + ");
    first = false;
    bool unit = mag == 1;
    if (!unit || j == 0) {
      if (denominator(mag) == 1)
        os << numerator(mag);
      else
        os << "\\frac{" << numerator(mag) << "}{" << denominator(mag) << "}";
    }
    if (j >= 1) os << "x";
    if (j >= 2) os << "^{" << j << "}";
  }
  if (first) os << "0";
  return os.str();
}

int term_count(const RationalPolynomial& poly) {
  int count = 0;
  for (const auto& c : poly.coeffs())
    if (c != 0) ++count;
  return count;
}

}  // namespace

std::string MomentPolynomial::to_latex() const {
  std::ostringstream os;
  os << "m_{" << d_ << "} = ";
  bool first = true;
  for (int k = 1; k <= d_; ++k) {
    const auto& b = blocks_[k - 1];
    if (term_count(b) == 0) continue;
    if (!first) os << " + ";
    first = false;
    std::string pk = k == 1 ? "p" : "p^{" + std::to_string(k) + "}";
    std::string body = x_poly_latex(b);
    if (body == "1")
      os << pk;
    else if (term_count(b) == 1)
      os << pk << " " << body;
    else
      os << pk << "\\left(" << body << "\\right)";
  }
  if (first) os << "0";
  return os.str();
}

std::string MomentPolynomial::to_json() const {
  nlohmann::json doc;
  doc["d"] = d_;
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [powers, c] : coefficients())
    terms.push_back({{"p_power", powers.first}, {"x_power", powers.second}, {"coefficient", rational_text(c)}});
  doc["terms"] = terms;
  nlohmann::json blocks = nlohmann::json::array();
  for (int k = 1; k < d_; ++k) {
    nlohmann::json entry;
    entry["k"] = k;
    nlohmann::json products = nlohmann::json::array();
    for (const auto& [type, mult] : block_terms_[k - 1])
      products.push_back({{"cycles", type}, {"multiplicity", mult}});
    entry["products"] = products;
    blocks.push_back(entry);
  }
  doc["block_terms"] = blocks;
  return doc.dump(2);
}

// ---- non-crossing partitions ----

int NonCrossingPartition::block_count() const {
  int top = -1;
  for (int l : labels) top = std::max(top, l);
  return top + 1;
}

std::vector<std::vector<int>> NonCrossingPartition::blocks() const {
  std::vector<std::vector<int>> out(block_count());
  for (std::size_t i = 0; i < labels.size(); ++i) out[labels[i]].push_back(static_cast<int>(i) + 1);
  return out;
}

bool is_noncrossing(const std::vector<int>& labels) {
  const int d = static_cast<int>(labels.size());
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b)
      for (int c = b + 1; c < d; ++c)
        for (int e = c + 1; e < d; ++e)
          if (labels[a] == labels[c] && labels[b] == labels[e] && labels[a] != labels[b]) return false;
  return true;
}

namespace {

struct NcWalker {
  int d;
  const std::function<void(const std::vector<int>&, int)>& visit;
  std::vector<int> labels;
  std::vector<int> last;
  std::vector<char> closed;
  int count = 0;

  void step(int i) {
    if (i == d) {
      visit(labels, count);
      return;
    }
    for (int b = 0; b < count; ++b) {
      if (closed[b]) continue;
      // joining b closes every block with an element after b's last element
      std::vector<int> newly_closed;
      for (int c = 0; c < count; ++c)
        if (c != b && !closed[c] && last[c] > last[b]) newly_closed.push_back(c);
      for (int c : newly_closed) closed[c] = 1;
      int saved = last[b];
      labels[i] = b;
      last[b] = i;
      step(i + 1);
      last[b] = saved;
      for (int c : newly_closed) closed[c] = 0;
    }
    labels[i] = count;
    last[count] = i;
    closed[count] = 0;
    ++count;
    step(i + 1);
    --count;
  }
};

CycleType contract_labels(const std::vector<int>& labels) {
  std::vector<int> walk;
  for (int l : labels)
    if (walk.empty() || walk.back() != l) walk.push_back(l);
  while (walk.size() > 1 && walk.front() == walk.back()) walk.pop_back();
  CycleType cycles;
  if (walk.size() <= 1) return cycles;

  const int blocks = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<char> on_stack(blocks, 0), finished(blocks, 0);
  std::vector<int> stack{walk[0]};
  on_stack[walk[0]] = 1;
  for (std::size_t idx = 1; idx <= walk.size(); ++idx) {
    int next = idx < walk.size() ? walk[idx] : walk[0];
    if (on_stack[next]) {
      int popped = 0;
      while (stack.back() != next) {
        on_stack[stack.back()] = 0;
        finished[stack.back()] = 1;
        stack.pop_back();
        ++popped;
      }
      cycles.push_back(popped + 1);
    } else if (finished[next]) {
      throw std::invalid_argument("crossing partition cannot be contracted into a cactus");
    } else {
      stack.push_back(next);
      on_stack[next] = 1;
    }
  }
  std::sort(cycles.rbegin(), cycles.rend());
  return cycles;
}

}  // namespace

void for_each_noncrossing_partition(int d, const std::function<void(const std::vector<int>&, int)>& visit) {
  if (d < 1 || d > 14) throw std::invalid_argument("non-crossing enumeration supports 1 <= d <= 14");
  NcWalker walker{d, visit, std::vector<int>(d), std::vector<int>(d), std::vector<char>(d), 0};
  walker.step(0);
}

std::vector<NonCrossingPartition> enumerate_noncrossing_partitions(int d) {
  std::vector<NonCrossingPartition> out;
  for_each_noncrossing_partition(d, [&](const std::vector<int>& labels, int) { out.push_back({labels}); });
  return out;
}

CycleType contract_cycle(const NonCrossingPartition& partition) {
  if (partition.labels.empty()) throw std::invalid_argument("empty partition");
  if (!is_noncrossing(partition.labels)) throw std::invalid_argument("partition is crossing");
  return contract_labels(partition.labels);
}

// ---- asymptotic moments ----

namespace {

struct MomentCache {
  std::mutex mutex;
  std::vector<RationalPolynomial> diagonal{RationalPolynomial::constant(1),
                                           RationalPolynomial::monomial(1, 1)};  // a_{1,1}, a_{2,2}
  std::map<int, MomentPolynomial> moments;
};

MomentCache& cache() {
  static MomentCache c;
  return c;
}

MomentPolynomial build_moment(int d, std::vector<RationalPolynomial>& diagonal) {
  std::vector<std::map<CycleType, std::int64_t>> terms(d);
  for_each_noncrossing_partition(d, [&](const std::vector<int>& labels, int k) {
    if (k == d) return;
    CycleType type = contract_labels(labels);
    int total = 0;
    for (int len : type) total += len;
    if (total != k + static_cast<int>(type.size()) - 1)
      throw std::logic_error("contraction violates the cactus edge count");
    ++terms[k - 1][type];
  });

  std::vector<RationalPolynomial> blocks(d);
  RationalPolynomial lower_sum;
  for (int k = 1; k < d; ++k) {
    RationalPolynomial block;
    for (const auto& [type, mult] : terms[k - 1]) {
      RationalPolynomial product = RationalPolynomial::constant(1);
      for (int len : type) product = product * diagonal[len - 1];
      block = block + product.scaled(Rational(mult));
    }
    blocks[k - 1] = block;
    lower_sum = lower_sum + block;
  }
  if (d == 1) {
    blocks[0] = RationalPolynomial::constant(1);
  } else if (d == 2) {
    blocks[1] = diagonal[1];
  } else {
    // a_{d,d} closes the p = 1 identity sum_k a_{d,k} = (x + 1)^{d-1}
    blocks[d - 1] = RationalPolynomial::x_plus_one_pow(d - 1) - lower_sum;
    if (static_cast<int>(diagonal.size()) < d) diagonal.push_back(blocks[d - 1]);
  }
  terms.pop_back();
  return MomentPolynomial(d, std::move(blocks), std::move(terms));
}

}  // namespace

MomentPolynomial asymptotic_moment(int d) {
  if (d < 1 || d > 12) throw std::invalid_argument("asymptotic moments support 1 <= d <= 12");
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  if (auto it = c.moments.find(d); it != c.moments.end()) return it->second;
  for (int j = 1; j <= d; ++j)
    if (!c.moments.count(j)) c.moments.emplace(j, build_moment(j, c.diagonal));
  return c.moments.at(d);
}

std::int64_t catalan(int d) {
  if (d < 0) throw std::invalid_argument("catalan needs d >= 0");
  std::int64_t c = 1;
  for (int i = 0; i < d; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

namespace {
std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}
}  // namespace

std::int64_t narayana(int d, int k) {
  if (d < 1 || k < 1 || k > d) return 0;
  return binomial(d, k) * binomial(d, k - 1) / d;
}

// ---- finite-n moments ----

MomentEstimate empirical_moment(const FrameMatrix& frame, const SelectionMode& mode, int d,
                                std::int64_t trials, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("moment order must be >= 1");
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  std::vector<double> values(trials);
  for (std::int64_t t = 0; t < trials; ++t) {
    auto sel = select(frame.n(), mode, derive_seed(seed, static_cast<std::uint64_t>(t)));
    double sum = 0.0;
    if (!sel.indices.empty()) {
      auto spec = subset_gram_spectrum(frame, sel);
      for (double v : spec.eigenvalues) sum += std::pow(v, d);
    }
    values[t] = sum / double(frame.n());
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= double(trials);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  double se = trials > 1 ? std::sqrt(var / double(trials - 1) / double(trials)) : 0.0;
  return {mean, se, trials};
}

double ExactMoment::evaluate(double p) const {
  double acc = 0.0;
  for (int k = d; k >= 1; --k) acc = (acc + a[k]) * p;
  return acc;
}

ExactMoment exact_expected_moment(const FrameMatrix& frame, int d) {
  if (d < 1 || d > 4) throw std::invalid_argument("exact moments support 1 <= d <= 4");
  const std::int64_t n = frame.n();
  if (std::pow(double(n), d) > kTupleBudget) throw std::invalid_argument("tuple enumeration exceeds budget");
  const Eigen::MatrixXcd c = frame.gram();  // c(i, j) = <f_i, f_j>

  std::vector<std::complex<double>> sums(d + 1);
  std::vector<std::int64_t> idx(d, 0);
  for (;;) {
    std::complex<double> prod = 1.0;
    for (int s = 0; s < d; ++s) prod *= c(idx[s], idx[(s + 1) % d]);
    int distinct = 0;
    for (int s = 0; s < d; ++s) {
      bool seen = false;
      for (int r = 0; r < s; ++r) seen = seen || idx[r] == idx[s];
      if (!seen) ++distinct;
    }
    sums[distinct] += prod;

    int pos = d - 1;
    while (pos >= 0 && ++idx[pos] == n) idx[pos--] = 0;
    if (pos < 0) break;
  }
  ExactMoment out{d, std::vector<double>(d + 1, 0.0)};
  for (int k = 1; k <= d; ++k) out.a[k] = sums[k].real() / double(n);
  return out;
}

double ewb_correction(double gamma, double p, int d, std::int64_t n) {
  if (d != 4) return 0.0;
  const double x = 1.0 / gamma - 1.0;
  return p * p * (1.0 - p) * (1.0 - p) * x * x / double(n - 1);
}

double ewb_bound(double gamma, double p, int d, std::int64_t n) {
  if (d < 2 || d > 4) throw std::invalid_argument("erasure welch bound covers d = 2, 3, 4");
  if (!(gamma > 0.0) || gamma > 1.0 || p < 0.0 || p > 1.0 || n < 2)
    throw std::invalid_argument("invalid erasure welch bound parameters");
  ManovaParams params = ManovaParams::from_p(gamma, p);
  double base = p == 0.0 ? 0.0 : manova_moment_closed(d, params);
  return base + ewb_correction(gamma, p, d, n);
}

double crossing_term_a42(const FrameMatrix& frame) {
  Eigen::MatrixXd sq = frame.gram().cwiseAbs2();
  double total = 0.0;
  for (Eigen::Index j = 0; j < sq.cols(); ++j)
    for (Eigen::Index i = 0; i < sq.rows(); ++i)
      if (i != j) total += sq(i, j) * sq(i, j);
  return total / double(frame.n());
}

std::vector<CrossingProbeRow> crossing_decay_probe(FrameFamily family, const std::vector<std::int64_t>& sizes) {
  std::vector<CrossingProbeRow> rows;
  for (auto n : sizes) {
    FrameRequest req;
    req.family = family;
    req.n = n;
    auto frame = construct_frame(req);
    const double x = double(frame.n()) / double(frame.m()) - 1.0;
    rows.push_back({frame.n(), frame.m(), crossing_term_a42(frame), x * x / double(frame.n() - 1)});
  }
  return rows;
}

}  // namespace etfs
