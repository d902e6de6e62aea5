#pragma once

#include "celsa/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace celsa {

struct SignedFactor {
  int dim = 0;
  int sign = 1;  // +1 or -1

  friend bool operator<(const SignedFactor& a, const SignedFactor& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.sign < b.sign;
  }
  friend bool operator==(const SignedFactor& a, const SignedFactor& b) {
    return a.dim == b.dim && a.sign == b.sign;
  }
};

struct ItemGroup {
  std::vector<int> members;            // sorted
  std::vector<SignedFactor> factors;   // L_c, sorted, unique
  std::string descriptor;
  Vec descriptor_vector;               // unit-norm
};

struct SegmentSet {
  std::vector<ItemGroup> segments;
  SpMatR segment_matrix;  // C x d, rows unit-norm, values s/sqrt(|L_c|)
  double tau = 0.8;
};

// Per-item metadata: free-text tokens (from title + tags).
struct ItemMetadata {
  std::vector<std::vector<std::string>> tokens;  // indexed by dense item id
};

ItemMetadata load_item_metadata(const std::string& path, Index n_items,
                                char delimiter = ',');

// Descriptor generation + sentence embedding, abstracted so the LLM-backed
// variant can be plugged in. Implementations must be deterministic and
// return unit-norm embeddings.
class DescriptorProvider {
 public:
  virtual ~DescriptorProvider() = default;
  virtual std::string describe(const std::vector<int>& members,
                               const ItemMetadata& metadata) const = 0;
  virtual Vec embed(const std::string& descriptor) const = 0;
};

// Default offline provider: descriptor = top-5 most frequent member tokens,
// embedding = l2-normalized term-frequency vector over the metadata vocab.
class TokenFrequencyProvider : public DescriptorProvider {
 public:
  explicit TokenFrequencyProvider(const ItemMetadata& metadata);
  std::string describe(const std::vector<int>& members,
                       const ItemMetadata& metadata) const override;
  Vec embed(const std::string& descriptor) const override;

 private:
  std::map<std::string, int> vocab_;
};

struct DominantFactorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// argmax_j |A_bar_s[i, j]| with its sign; ties to the lower dimension.
// Throws DominantFactorError on a dead row.
SignedFactor dominant_factor(const SpMatR& A_bar_s, Index item);

struct GroupingResult {
  std::vector<ItemGroup> groups;       // ordered by (dim, sign)
  std::vector<Index> unsegmented;      // dead-row items
};

GroupingResult group_items(const SpMatR& A_bar_s);

// Greedy merge of the most similar descriptor pair while similarity > tau;
// merged groups are re-described and re-embedded by the provider.
SegmentSet merge_segments(std::vector<ItemGroup> groups,
                          const DescriptorProvider& provider,
                          const ItemMetadata& metadata, double tau, Index d);

SpMatR build_segment_matrix(const std::vector<ItemGroup>& segments, Index d,
                            const SpMatR* A_bar_s = nullptr);

// r_seg = x^T A_bar_s B_bar_s^T; no self-subtraction.
Vec segment_scores(const std::vector<int>& x_items, const SpMatR& A_bar_s,
                   const SpMatR& B_bar_s);

void write_segments_json(const std::string& path, const SegmentSet& set);

}  // namespace celsa
