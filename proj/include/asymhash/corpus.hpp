#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace asymhash {

// A group of distinct passwords that were all observed `frequency` times.
struct EquivalenceSet {
  std::uint64_t frequency = 0;
  std::uint64_t size = 0;

  friend bool operator==(const EquivalenceSet&, const EquivalenceSet&) = default;
};

// Compact password frequency corpus. Entries are kept in canonical form:
// strictly decreasing frequency, duplicate frequencies merged.
class EquivalenceSets {
 public:
  EquivalenceSets() = default;
  explicit EquivalenceSets(std::vector<EquivalenceSet> entries);

  std::span<const EquivalenceSet> entries() const { return entries_; }
  std::uint64_t accounts() const { return accounts_; }    // n_a
  std::uint64_t passwords() const { return passwords_; }  // n_p
  std::size_t size() const { return entries_.size(); }    // n_e
  bool empty() const { return entries_.empty(); }

  // Number of passwords observed exactly once.
  std::uint64_t singletons() const;

  friend bool operator==(const EquivalenceSets&, const EquivalenceSets&) = default;

 private:
  std::vector<EquivalenceSet> entries_;
  std::uint64_t accounts_ = 0;
  std::uint64_t passwords_ = 0;
};

enum class CorpusFormat { kEquivalenceSets, kPlaintext };

// Throws ParseError on malformed lines and InputError on an empty corpus.
EquivalenceSets parse_corpus(std::istream& in, CorpusFormat format);

// Reads from `path`, or from standard input when path is "-".
EquivalenceSets load_corpus(const std::string& path, CorpusFormat format);

// Writes the "frequency count" line format accepted by parse_corpus.
void write_corpus(std::ostream& out, const EquivalenceSets& sets);

// Empirical password distribution Pr[pw_i] = f_i / n_a, expanded to one entry
// per distinct password, most probable first. Copies share the underlying
// storage; instances are immutable.
class PasswordDistribution {
 public:
  PasswordDistribution();

  // Groups consecutive equal probabilities into equivalence sets. Throws
  // InputError unless `probs` is non-empty, positive, non-increasing and sums
  // to at most 1 + 1e-9.
  static PasswordDistribution from_probabilities(std::vector<double> probs);

  std::span<const double> probs() const { return data_->probs; }
  double prob(std::size_t index) const { return data_->probs[index]; }
  std::size_t size() const { return data_->probs.size(); }

  // x_0 = 0, x_k = |es_1| + ... + |es_k|.
  std::span<const std::size_t> boundaries() const { return data_->boundaries; }

  // Index into boundaries() of the equivalence set holding password `index`
  // (0-based), i.e. the k with x_{k-1} <= index < x_k, minus one.
  std::size_t set_of(std::size_t index) const { return data_->set_of[index]; }

  bool is_boundary(std::size_t prefix_len) const;

  // Largest boundary x_k with x_k <= prefix_len.
  std::size_t boundary_at_or_below(std::size_t prefix_len) const;

 private:
  struct Data {
    std::vector<double> probs;
    std::vector<std::size_t> boundaries;
    std::vector<std::size_t> set_of;
  };
  explicit PasswordDistribution(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  static std::shared_ptr<const Data> build(std::vector<double> probs,
                                           std::vector<std::size_t> set_sizes);

  std::shared_ptr<const Data> data_;

  friend PasswordDistribution to_distribution(const EquivalenceSets& sets);
};

PasswordDistribution to_distribution(const EquivalenceSets& sets);

enum class Region { kConfident, kYellow, kRed };

const char* to_string(Region region);

struct ConfidenceAnnotation {
  static constexpr double kYellowThreshold = 0.01;
  static constexpr double kRedThreshold = 0.1;
  static constexpr double kDelta = 0.01;

  std::vector<double> divergence_bound;
  std::vector<Region> region;
};

Region classify_divergence(double divergence);

// Corpus-wide bound on the CDF divergence between the empirical and the true
// distribution: Good-Turing missing mass N_1/n_a plus a 3*sqrt(ln(2/delta)/n_a)
// concentration slack, delta = 0.01.
double divergence_bound(const EquivalenceSets& sets);

ConfidenceAnnotation confidence_regions(const EquivalenceSets& sets,
                                        std::span<const double> cutoffs);

// Draws n_a samples from a Zipf(n_p, s) law and groups the observed counts.
// Deterministic given the seed.
EquivalenceSets gen_zipf(std::uint64_t n_p, double s, std::uint64_t n_a, std::uint64_t seed);

}  // namespace asymhash
