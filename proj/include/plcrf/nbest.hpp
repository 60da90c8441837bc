#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "plcrf/heatmap.hpp"

namespace plcrf {

// Per-joint candidate values, each row sorted in non-increasing order.
// Candidate index k of joint i refers to scores[i][k].
using ScoreTable = std::vector<std::vector<double>>;

ScoreTable score_table(const JointCandidateSet& candidates);

// One candidate index per joint and the summed score.
struct Assignment {
    std::vector<int> indices;
    double score = 0.0;
};

// Sum of the selected values, accumulated in joint order.
double assignment_score(const ScoreTable& scores, const std::vector<int>& indices);

// Strict total order used for ranking: higher score first, equal scores by
// colexicographic index order (the last joint is most significant). For two
// single-joint switches away from a common best assignment this prefers the
// lower joint index.
bool ranks_before(const Assignment& a, const Assignment& b);

// Product-set restriction: joint i may take any index in allowed[i]. Lists
// keep ascending index order, which is non-increasing score order.
struct CandidateSubset {
    std::vector<std::vector<int>> allowed;

    static CandidateSubset full(const ScoreTable& scores);

    bool contains(const std::vector<int>& indices) const;

    // Number of assignments; saturates at UINT64_MAX.
    std::uint64_t cardinality() const;

    void validate(const ScoreTable& scores) const;
};

Assignment best_of_subset(const CandidateSubset& subset, const ScoreTable& scores);

struct SecondBest {
    Assignment assignment;
    std::size_t joint = 0;
    int old_index = 0;
    int new_index = 0;
};

// Best assignment with the single joint whose top-to-second drop is smallest
// switched to its second allowed index; nullopt when the subset has one
// element.
std::optional<SecondBest> second_best_of_subset(const CandidateSubset& subset, const ScoreTable& scores);

// Splits `subset` into A (joint fixed to new_index) and B (new_index removed).
// A and B are disjoint and their union is `subset`.
std::pair<CandidateSubset, CandidateSubset> divide_subset(const CandidateSubset& subset, std::size_t joint,
                                                          int old_index, int new_index);

// Incremental exact N-best enumeration by recursive partitioning of the
// candidate product set. Each call to next() yields the next assignment in
// ranks_before order.
class NBestEnumerator {
public:
    explicit NBestEnumerator(ScoreTable scores);

    std::optional<Assignment> next();

    std::size_t emitted() const { return emitted_; }

    // Every subset of the current partition, exhausted ones included. The
    // best element of each has already been emitted.
    const std::vector<CandidateSubset>& partition() const { return subsets_; }

private:
    struct Entry {
        SecondBest second;
        std::size_t subset;  // index into subsets_
        std::uint64_t order;
    };
    struct EntryAfter {
        bool operator()(const Entry& a, const Entry& b) const;
    };

    void enqueue(std::size_t subset_index);

    ScoreTable scores_;
    std::vector<CandidateSubset> subsets_;
    std::priority_queue<Entry, std::vector<Entry>, EntryAfter> queue_;
    std::optional<Assignment> first_;
    std::size_t emitted_ = 0;
    std::uint64_t order_ = 0;
};

// The `count` highest-ranked assignments (fewer if the product set is
// smaller), best first.
std::vector<Assignment> n_best_poses(const ScoreTable& scores, std::size_t count);
std::vector<Assignment> n_best_poses(const JointCandidateSet& candidates, std::size_t count);

}  // namespace plcrf
