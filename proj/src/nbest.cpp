#include "plcrf/nbest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "plcrf/errors.hpp"

namespace plcrf {

ScoreTable score_table(const JointCandidateSet& candidates) {
    ScoreTable table;
    table.reserve(candidates.joints.size());
    for (const auto& modes : candidates.joints) {
        std::vector<double> row;
        row.reserve(modes.size());
        for (const auto& m : modes) row.push_back(m.value);
        table.push_back(std::move(row));
    }
    return table;
}

double assignment_score(const ScoreTable& scores, const std::vector<int>& indices) {
    double total = 0.0;
    for (std::size_t i = 0; i < indices.size(); ++i) total += scores[i][static_cast<std::size_t>(indices[i])];
    return total;
}

bool ranks_before(const Assignment& a, const Assignment& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::lexicographical_compare(a.indices.rbegin(), a.indices.rend(), b.indices.rbegin(), b.indices.rend());
}

CandidateSubset CandidateSubset::full(const ScoreTable& scores) {
    CandidateSubset s;
    s.allowed.reserve(scores.size());
    for (const auto& row : scores) {
        std::vector<int> all(row.size());
        for (std::size_t k = 0; k < row.size(); ++k) all[k] = static_cast<int>(k);
        s.allowed.push_back(std::move(all));
    }
    return s;
}

bool CandidateSubset::contains(const std::vector<int>& indices) const {
    if (indices.size() != allowed.size()) return false;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (!std::binary_search(allowed[i].begin(), allowed[i].end(), indices[i])) return false;
    }
    return true;
}

std::uint64_t CandidateSubset::cardinality() const {
    std::uint64_t total = 1;
    for (const auto& list : allowed) {
        const std::uint64_t n = list.size();
        if (n != 0 && total > std::numeric_limits<std::uint64_t>::max() / n) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        total *= n;
    }
    return total;
}

void CandidateSubset::validate(const ScoreTable& scores) const {
    if (allowed.size() != scores.size()) throw DimensionMismatchError("candidate subset: joint count mismatch");
    for (std::size_t i = 0; i < allowed.size(); ++i) {
        if (allowed[i].empty()) throw DataError("candidate subset: joint " + std::to_string(i) + " has no candidates");
        for (std::size_t k = 0; k < allowed[i].size(); ++k) {
            const int idx = allowed[i][k];
            if (idx < 0 || static_cast<std::size_t>(idx) >= scores[i].size()) {
                throw DataError("candidate subset: index out of range");
            }
            if (k > 0 && allowed[i][k - 1] >= idx) throw DataError("candidate subset: indices must ascend");
        }
    }
}

Assignment best_of_subset(const CandidateSubset& subset, const ScoreTable& scores) {
    Assignment a;
    a.indices.reserve(subset.allowed.size());
    for (const auto& list : subset.allowed) a.indices.push_back(list.front());
    a.score = assignment_score(scores, a.indices);
    return a;
}

std::optional<SecondBest> second_best_of_subset(const CandidateSubset& subset, const ScoreTable& scores) {
    const Assignment best = best_of_subset(subset, scores);
    std::optional<SecondBest> result;
    for (std::size_t i = 0; i < subset.allowed.size(); ++i) {
        const auto& list = subset.allowed[i];
        if (list.size() < 2) continue;
        SecondBest candidate;
        candidate.assignment.indices = best.indices;
        candidate.assignment.indices[i] = list[1];
        candidate.assignment.score = assignment_score(scores, candidate.assignment.indices);
        candidate.joint = i;
        candidate.old_index = list[0];
        candidate.new_index = list[1];
        if (!result || ranks_before(candidate.assignment, result->assignment)) result = std::move(candidate);
    }
    return result;
}

std::pair<CandidateSubset, CandidateSubset> divide_subset(const CandidateSubset& subset, std::size_t joint,
                                                          int old_index, int new_index) {
    if (joint >= subset.allowed.size()) throw DataError("divide_subset: joint out of range");
    const auto& list = subset.allowed[joint];
    const auto pos = std::lower_bound(list.begin(), list.end(), new_index);
    if (pos == list.end() || *pos != new_index) throw DataError("divide_subset: new index not allowed");
    if (old_index == new_index) throw DataError("divide_subset: old and new index coincide");

    CandidateSubset with = subset;
    with.allowed[joint] = {new_index};

    CandidateSubset without = subset;
    auto& rest = without.allowed[joint];
    rest.erase(rest.begin() + (pos - list.begin()));
    return {std::move(with), std::move(without)};
}

bool NBestEnumerator::EntryAfter::operator()(const Entry& a, const Entry& b) const {
    // priority_queue pops the greatest element, so "a after b" means lower rank.
    if (ranks_before(b.second.assignment, a.second.assignment)) return true;
    if (ranks_before(a.second.assignment, b.second.assignment)) return false;
    return a.order > b.order;
}

NBestEnumerator::NBestEnumerator(ScoreTable scores) : scores_(std::move(scores)) {
    if (scores_.empty()) throw DataError("n-best: no joints");
    for (std::size_t i = 0; i < scores_.size(); ++i) {
        const auto& row = scores_[i];
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (!std::isfinite(row[k])) throw DataError("n-best: non-finite score at joint " + std::to_string(i));
            if (k > 0 && row[k] > row[k - 1]) {
                throw DataError("n-best: scores of joint " + std::to_string(i) + " are not in non-increasing order");
            }
        }
    }
    CandidateSubset all = CandidateSubset::full(scores_);
    all.validate(scores_);
    first_ = best_of_subset(all, scores_);
    subsets_.push_back(std::move(all));
}

void NBestEnumerator::enqueue(std::size_t subset_index) {
    if (auto second = second_best_of_subset(subsets_[subset_index], scores_)) {
        queue_.push(Entry{std::move(*second), subset_index, order_++});
    }
}

std::optional<Assignment> NBestEnumerator::next() {
    if (first_) {
        Assignment out = std::move(*first_);
        first_.reset();
        enqueue(0);
        ++emitted_;
        return out;
    }
    if (queue_.empty()) return std::nullopt;

    Entry top = queue_.top();
    queue_.pop();
    auto [with, without] =
        divide_subset(subsets_[top.subset], top.second.joint, top.second.old_index, top.second.new_index);
    subsets_[top.subset] = std::move(without);
    subsets_.push_back(std::move(with));
    enqueue(top.subset);
    enqueue(subsets_.size() - 1);
    ++emitted_;
    return std::move(top.second.assignment);
}

std::vector<Assignment> n_best_poses(const ScoreTable& scores, std::size_t count) {
    if (count == 0) throw DataError("n_best_poses: count must be at least 1");
    NBestEnumerator enumerator(scores);
    std::vector<Assignment> out;
    out.reserve(count);
    while (out.size() < count) {
        auto next = enumerator.next();
        if (!next) break;
        out.push_back(std::move(*next));
    }
    return out;
}

std::vector<Assignment> n_best_poses(const JointCandidateSet& candidates, std::size_t count) {
    return n_best_poses(score_table(candidates), count);
}

}  // namespace plcrf
