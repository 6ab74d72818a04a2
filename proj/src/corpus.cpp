#include "asymhash/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <unordered_map>

#include "asymhash/errors.hpp"

namespace asymhash {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(first, last - first + 1);
}

std::uint64_t parse_count(std::string_view token, std::size_t line_no, const char* what) {
  std::uint64_t value = 0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end || token.empty()) {
    throw ParseError(line_no, std::string(what) + " is not a positive integer: '" +
                                  std::string(token) + "'");
  }
  if (value == 0) throw ParseError(line_no, std::string(what) + " must be positive");
  return value;
}

EquivalenceSets parse_equivalence_sets(std::istream& in) {
  std::vector<EquivalenceSet> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;

    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < view.size()) {
      const auto start = view.find_first_not_of(" \t", pos);
      if (start == std::string_view::npos) break;
      auto stop = view.find_first_of(" \t", start);
      if (stop == std::string_view::npos) stop = view.size();
      tokens.push_back(view.substr(start, stop - start));
      pos = stop;
    }
    if (tokens.size() != 2) {
      throw ParseError(line_no, "expected 'frequency count', got " +
                                    std::to_string(tokens.size()) + " fields");
    }
    entries.push_back({parse_count(tokens[0], line_no, "frequency"),
                       parse_count(tokens[1], line_no, "count")});
  }
  if (entries.empty()) throw InputError("empty corpus");
  return EquivalenceSets(std::move(entries));
}

EquivalenceSets parse_plaintext(std::istream& in) {
  std::unordered_map<std::string, std::uint64_t> counts;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++counts[line];
  }
  if (counts.empty()) throw InputError("empty corpus");
  std::map<std::uint64_t, std::uint64_t> by_frequency;
  for (const auto& [password, count] : counts) ++by_frequency[count];
  std::vector<EquivalenceSet> entries;
  entries.reserve(by_frequency.size());
  for (const auto& [frequency, size] : by_frequency) entries.push_back({frequency, size});
  return EquivalenceSets(std::move(entries));
}

}  // namespace

EquivalenceSets::EquivalenceSets(std::vector<EquivalenceSet> entries) {
  std::map<std::uint64_t, std::uint64_t, std::greater<>> merged;
  for (const auto& e : entries) {
    if (e.frequency == 0 || e.size == 0) {
      throw InputError("equivalence set frequency and size must be positive");
    }
    merged[e.frequency] += e.size;
  }
  entries_.reserve(merged.size());
  for (const auto& [frequency, size] : merged) {
    entries_.push_back({frequency, size});
    accounts_ += frequency * size;
    passwords_ += size;
  }
}

std::uint64_t EquivalenceSets::singletons() const {
  if (entries_.empty() || entries_.back().frequency != 1) return 0;
  return entries_.back().size;
}

EquivalenceSets parse_corpus(std::istream& in, CorpusFormat format) {
  switch (format) {
    case CorpusFormat::kEquivalenceSets:
      return parse_equivalence_sets(in);
    case CorpusFormat::kPlaintext:
      return parse_plaintext(in);
  }
  throw InputError("unknown corpus format");
}

EquivalenceSets load_corpus(const std::string& path, CorpusFormat format) {
  if (path == "-") return parse_corpus(std::cin, format);
  std::ifstream in(path);
  if (!in) throw InputError("cannot open corpus '" + path + "'");
  return parse_corpus(in, format);
}

void write_corpus(std::ostream& out, const EquivalenceSets& sets) {
  for (const auto& e : sets.entries()) out << e.frequency << ' ' << e.size << '\n';
}

PasswordDistribution::PasswordDistribution()
    : data_(build({1.0}, {1})) {}

std::shared_ptr<const PasswordDistribution::Data> PasswordDistribution::build(
    std::vector<double> probs, std::vector<std::size_t> set_sizes) {
  auto data = std::make_shared<Data>();
  data->probs = std::move(probs);
  data->boundaries.reserve(set_sizes.size() + 1);
  data->boundaries.push_back(0);
  data->set_of.reserve(data->probs.size());
  for (std::size_t k = 0; k < set_sizes.size(); ++k) {
    data->boundaries.push_back(data->boundaries.back() + set_sizes[k]);
    data->set_of.insert(data->set_of.end(), set_sizes[k], k);
  }
  return data;
}

PasswordDistribution PasswordDistribution::from_probabilities(std::vector<double> probs) {
  if (probs.empty()) throw InputError("distribution must contain at least one password");
  double total = 0.0;
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0.0)) throw InputError("password probabilities must be positive");
    if (i > 0 && probs[i] > probs[i - 1]) {
      throw InputError("password probabilities must be non-increasing");
    }
    total += probs[i];
    if (i == 0 || probs[i] != probs[i - 1]) {
      sizes.push_back(1);
    } else {
      ++sizes.back();
    }
  }
  if (total > 1.0 + 1e-9) throw InputError("password probabilities sum above 1");
  return PasswordDistribution(build(std::move(probs), std::move(sizes)));
}

bool PasswordDistribution::is_boundary(std::size_t prefix_len) const {
  const auto& b = data_->boundaries;
  return std::binary_search(b.begin(), b.end(), prefix_len);
}

std::size_t PasswordDistribution::boundary_at_or_below(std::size_t prefix_len) const {
  const auto& b = data_->boundaries;
  auto it = std::upper_bound(b.begin(), b.end(), prefix_len);
  return *std::prev(it);
}

PasswordDistribution to_distribution(const EquivalenceSets& sets) {
  if (sets.empty()) throw InputError("empty corpus");
  std::vector<double> probs;
  probs.reserve(sets.passwords());
  std::vector<std::size_t> sizes;
  sizes.reserve(sets.size());
  const double n_a = static_cast<double>(sets.accounts());
  for (const auto& e : sets.entries()) {
    probs.insert(probs.end(), e.size, static_cast<double>(e.frequency) / n_a);
    sizes.push_back(e.size);
  }
  return PasswordDistribution(PasswordDistribution::build(std::move(probs), std::move(sizes)));
}

const char* to_string(Region region) {
  switch (region) {
    case Region::kConfident:
      return "confident";
    case Region::kYellow:
      return "yellow";
    case Region::kRed:
      return "red";
  }
  return "?";
}

Region classify_divergence(double divergence) {
  if (divergence > ConfidenceAnnotation::kRedThreshold) return Region::kRed;
  if (divergence > ConfidenceAnnotation::kYellowThreshold) return Region::kYellow;
  return Region::kConfident;
}

double divergence_bound(const EquivalenceSets& sets) {
  if (sets.accounts() == 0) throw InputError("confidence regions need a non-empty corpus");
  const double n_a = static_cast<double>(sets.accounts());
  const double missing_mass = static_cast<double>(sets.singletons()) / n_a;
  return missing_mass + 3.0 * std::sqrt(std::log(2.0 / ConfidenceAnnotation::kDelta) / n_a);
}

ConfidenceAnnotation confidence_regions(const EquivalenceSets& sets,
                                        std::span<const double> cutoffs) {
  const double bound = divergence_bound(sets);
  ConfidenceAnnotation out;
  out.divergence_bound.reserve(cutoffs.size());
  out.region.reserve(cutoffs.size());
  for (double cutoff : cutoffs) {
    if (!(cutoff >= 0.0 && cutoff <= 1.0)) throw InputError("cutoffs must lie in [0, 1]");
    out.divergence_bound.push_back(bound);
    out.region.push_back(classify_divergence(bound));
  }
  return out;
}

EquivalenceSets gen_zipf(std::uint64_t n_p, double s, std::uint64_t n_a, std::uint64_t seed) {
  if (n_p == 0) throw InputError("zipf support must contain at least one password");
  if (n_a == 0) throw InputError("zipf sample size must be positive");
  if (!(s >= 0.0) || !std::isfinite(s)) throw InputError("zipf exponent must be >= 0");

  std::vector<double> weights(n_p);
  for (std::uint64_t k = 0; k < n_p; ++k) {
    weights[k] = std::pow(static_cast<double>(k + 1), -s);
  }
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::uint64_t> draw(weights.begin(), weights.end());
  std::vector<std::uint64_t> counts(n_p, 0);
  for (std::uint64_t i = 0; i < n_a; ++i) ++counts[draw(rng)];

  std::map<std::uint64_t, std::uint64_t> by_frequency;
  for (auto c : counts) {
    if (c > 0) ++by_frequency[c];
  }
  std::vector<EquivalenceSet> entries;
  for (const auto& [frequency, size] : by_frequency) entries.push_back({frequency, size});
  return EquivalenceSets(std::move(entries));
}

}  // namespace asymhash
