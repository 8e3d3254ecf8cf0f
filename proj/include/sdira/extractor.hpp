#pragma once

// Cyclic inner-product two-source extractor and statistical checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sdira/errors.hpp"

namespace sdira {

class BitString {
 public:
  BitString() = default;
  explicit BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) {
      if (b > 1) throw DomainError("bits must be 0 or 1");
    }
  }
  /// From a string of '0'/'1' characters.
  static BitString parse_binary(const std::string& s) {
    std::vector<std::uint8_t> bits;
    for (char c : s) {
      if (c != '0' && c != '1') throw DomainError("binary string may contain only 0 and 1");
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return BitString(std::move(bits));
  }

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  void push_back(std::uint8_t b) { bits_.push_back(b & 1u); }

  std::string to_binary() const {
    std::string s;
    for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
    return s;
  }

  /// "len:hex" with the first bit as the most significant of the value.
  std::string to_hex() const {
    static const char* digits = "0123456789abcdef";
    const std::size_t n = bits_.size();
    const std::size_t width = (n + 3) / 4;
    std::string hex(width == 0 ? 1 : width, '0');
    for (std::size_t i = 0; i < n; ++i) {
      if (!bits_[i]) continue;
      const std::size_t pos = n - 1 - i;
      const std::size_t digit = width - 1 - pos / 4;
      const int val = (hex[digit] >= 'a') ? hex[digit] - 'a' + 10 : hex[digit] - '0';
      hex[digit] = digits[val | (1 << (pos % 4))];
    }
    return std::to_string(n) + ":" + hex;
  }

  static BitString from_hex(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw DomainError("bit string must be formatted as len:hex");
    std::size_t n = 0;
    try {
      n = static_cast<std::size_t>(std::stoull(s.substr(0, colon)));
    } catch (const std::exception&) {
      throw DomainError("bit string length is not a number");
    }
    const std::string hex = s.substr(colon + 1);
    if (hex.empty() || hex.size() > std::max<std::size_t>(1, (n + 3) / 4)) {
      throw DomainError("hex payload does not match the declared length");
    }
    std::vector<std::uint8_t> bits(n, 0);
    const std::size_t width = hex.size();
    for (std::size_t d = 0; d < width; ++d) {
      const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(hex[d])));
      int val;
      if (c >= '0' && c <= '9') {
        val = c - '0';
      } else if (c >= 'a' && c <= 'f') {
        val = c - 'a' + 10;
      } else {
        throw DomainError("invalid hex digit");
      }
      for (int b = 0; b < 4; ++b) {
        const std::size_t pos = (width - 1 - d) * 4 + static_cast<std::size_t>(b);
        if (!((val >> b) & 1)) continue;
        if (pos >= n) throw DomainError("hex payload has bits beyond the declared length");
        bits[n - 1 - pos] = 1;
      }
    }
    return BitString(std::move(bits));
  }

  friend BitString operator^(const BitString& a, const BitString& b) {
    if (a.size() != b.size()) throw DomainError("xor of bit strings of different lengths");
    std::vector<std::uint8_t> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
    return BitString(std::move(out));
  }
  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// 64-bit FNV-1a over the bits, for compact run summaries.
inline std::uint64_t fnv1a(const BitString& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto b : s.bits()) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct ExtractorSpec {
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t m = 0;

  void validate() const {
    if (n == 0) throw DomainError("extractor input length must be positive");
    if (n % 2 == 0) throw DomainError("cyclic extractor needs odd n");
    if (d != n) throw DomainError("cyclic extractor needs d = n");
    if (m > n) throw DomainError("extractor output length exceeds n");
  }
};

/// Bit j = parity(a AND rot_j(z)), where rot_j(z)_i = z_{(i + j) mod n}.
inline BitString extract(const BitString& a, const BitString& z, const ExtractorSpec& spec) {
  spec.validate();
  if (a.size() != spec.n || z.size() != spec.d) throw DomainError("extractor input length mismatch");
  const std::size_t n = spec.n;
  std::vector<std::uint8_t> out(spec.m, 0);
  // Doubling z makes every rotation a contiguous window.
  std::vector<std::uint8_t> zz(2 * n);
  for (std::size_t i = 0; i < n; ++i) zz[i] = zz[i + n] = z[i];
  const auto& ab = a.bits();
  for (std::size_t j = 0; j < spec.m; ++j) {
    std::uint8_t acc = 0;
    const std::uint8_t* w = zz.data() + j;
    for (std::size_t i = 0; i < n; ++i) acc ^= static_cast<std::uint8_t>(ab[i] & w[i]);
    out[j] = acc;
  }
  return BitString(std::move(out));
}

struct UniformityReport {
  bool passed = false;
  double alpha = 0.0;
  /// alpha divided by the number of tests.
  double per_test_level = 0.0;
  std::size_t tests = 0;
  double min_p_value = 1.0;
  std::string worst_test;
  bool zero_variance = false;
};

namespace detail {
inline double two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }
}  // namespace detail

/// Per-bit frequency z-tests and pairwise correlation tests, Bonferroni corrected.
inline UniformityReport uniformity_test(const std::vector<BitString>& samples, double alpha) {
  if (samples.size() < 1000) throw DomainError("uniformity_test needs at least 1000 samples");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  const std::size_t len = samples.front().size();
  if (len == 0) throw DomainError("samples must be non-empty");
  for (const auto& s : samples) {
    if (s.size() != len) throw DomainError("samples must share one length");
  }
  const double N = static_cast<double>(samples.size());
  UniformityReport r;
  r.alpha = alpha;
  r.tests = len + len * (len - 1) / 2;
  r.per_test_level = alpha / static_cast<double>(r.tests);

  std::vector<double> ones(len, 0.0);
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < len; ++i) ones[i] += s[i];
  }
  auto consider = [&](double p, std::string name) {
    if (p < r.min_p_value) {
      r.min_p_value = p;
      r.worst_test = std::move(name);
    }
  };
  for (std::size_t i = 0; i < len; ++i) {
    if (ones[i] == 0.0 || ones[i] == N) r.zero_variance = true;
    consider(detail::two_sided_p((ones[i] - N / 2.0) / std::sqrt(N / 4.0)), "frequency bit " + std::to_string(i));
  }
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t j = i + 1; j < len; ++j) {
      double agree = 0.0;
      for (const auto& s : samples) agree += (s[i] == s[j]) ? 1.0 : -1.0;
      consider(detail::two_sided_p(agree / std::sqrt(N)),
               "correlation bits " + std::to_string(i) + "," + std::to_string(j));
    }
  }
  r.passed = !r.zero_variance && r.min_p_value >= r.per_test_level;
  return r;
}

/// Rank over GF(2) of a square binary matrix given as rows.
inline std::size_t gf2_rank(std::vector<std::vector<std::uint8_t>> rows) {
  std::size_t rank = 0;
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && !rows[pivot][c]) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && rows[r][c]) {
        for (std::size_t k = c; k < cols; ++k) rows[r][k] ^= rows[rank][k];
      }
    }
    ++rank;
  }
  return rank;
}

struct StrongnessCheck {
  /// Exact E_z SD(Ext(A, z), U_m).
  double distance = 0.0;
  /// 1/2 sqrt(sum_{t != 0} |ker M_t| / |A|).
  double bound = 0.0;
  bool within_bound = false;
};

/// Exhaustive strongness check for a flat source on the set A.
inline StrongnessCheck strongness_check(const std::vector<BitString>& a_set, const ExtractorSpec& spec) {
  spec.validate();
  if (a_set.empty()) throw DomainError("source set must be non-empty");
  if (spec.n > 20 || spec.m > 10) throw DomainError("exhaustive strongness check is limited to desk-scale sizes");
  const std::size_t n = spec.n;
  const std::size_t outcomes = std::size_t{1} << spec.m;
  const double inv_a = 1.0 / static_cast<double>(a_set.size());
  double total = 0.0;
  std::vector<double> hist(outcomes);
  for (std::uint64_t zv = 0; zv < (std::uint64_t{1} << n); ++zv) {
    std::vector<std::uint8_t> zb(n);
    for (std::size_t i = 0; i < n; ++i) zb[i] = static_cast<std::uint8_t>((zv >> i) & 1u);
    const BitString z(std::move(zb));
    std::fill(hist.begin(), hist.end(), 0.0);
    for (const auto& a : a_set) {
      const auto k = extract(a, z, spec);
      std::size_t idx = 0;
      for (std::size_t j = 0; j < spec.m; ++j) idx |= static_cast<std::size_t>(k[j]) << j;
      hist[idx] += inv_a;
    }
    double sd = 0.0;
    for (double p : hist) sd += std::abs(p - 1.0 / static_cast<double>(outcomes));
    total += 0.5 * sd;
  }
  StrongnessCheck out;
  out.distance = total / static_cast<double>(std::uint64_t{1} << n);

  // (M_t a)_k = sum_j t_j a_{(k - j) mod n}
  double kernel_sum = 0.0;
  for (std::size_t t = 1; t < outcomes; ++t) {
    std::vector<std::vector<std::uint8_t>> rows(n, std::vector<std::uint8_t>(n, 0));
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < spec.m; ++j) {
        if ((t >> j) & 1u) rows[k][(k + n - j % n) % n] ^= 1u;
      }
    }
    kernel_sum += std::exp2(static_cast<double>(n - gf2_rank(rows)));
  }
  out.bound = 0.5 * std::sqrt(kernel_sum * inv_a);
  out.within_bound = out.distance <= out.bound + 1e-12;
  return out;
}

}  // namespace sdira
