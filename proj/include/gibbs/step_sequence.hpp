#pragma once

#include <cassert>
#include <cstddef>
#include <optional>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

namespace gibbs {

/// Sequence of per-step objects (potential tables, transfer matrices) that is
/// either stored explicitly or as one repeated body followed by an optional
/// distinct last step. The repeated form keeps chains of length 10^6 at O(1)
/// storage.
template <class Step>
class StepSequence {
 public:
  StepSequence() = default;

  static StepSequence from_list(std::vector<Step> steps) {
    StepSequence s;
    s.size_ = steps.size();
    s.distinct_ = std::move(steps);
    s.repeated_ = false;
    return s;
  }

  /// `count` is the total number of steps, including `last` when present.
  static StepSequence repeated(Step body, std::size_t count, std::optional<Step> last = std::nullopt) {
    StepSequence s;
    s.repeated_ = true;
    s.size_ = count;
    s.distinct_.push_back(std::move(body));
    if (last && count > 0) s.distinct_.push_back(std::move(*last));
    return s;
  }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool is_repeated() const { return repeated_; }
  bool has_distinct_last() const { return repeated_ && distinct_.size() == 2; }

  /// Number of leading steps equal to body() in repeated form.
  std::size_t body_count() const { return has_distinct_last() ? size_ - 1 : size_; }

  const Step& body() const {
    assert(repeated_);
    return distinct_.front();
  }
  const Step& last() const { return (*this)[size_ - 1]; }

  /// Zero-based access.
  const Step& operator[](std::size_t i) const {
    assert(i < size_);
    if (!repeated_) return distinct_[i];
    if (distinct_.size() == 2 && i + 1 == size_) return distinct_[1];
    return distinct_[0];
  }

  /// The physically stored steps.
  std::span<const Step> distinct() const { return distinct_; }

  /// Applies `f` to every stored step, keeping the storage form.
  template <class F>
  auto transform(F&& f) const -> StepSequence<std::decay_t<std::invoke_result_t<F&, const Step&>>> {
    using Out = std::decay_t<std::invoke_result_t<F&, const Step&>>;
    StepSequence<Out> out;
    std::vector<Out> mapped;
    mapped.reserve(distinct_.size());
    for (const auto& s : distinct_) mapped.push_back(f(s));
    if (!repeated_) return StepSequence<Out>::from_list(std::move(mapped));
    std::optional<Out> last;
    if (mapped.size() == 2) last = std::move(mapped[1]);
    return StepSequence<Out>::repeated(std::move(mapped[0]), size_, std::move(last));
  }

 private:
  std::vector<Step> distinct_;
  std::size_t size_ = 0;
  bool repeated_ = false;
};

}  // namespace gibbs
