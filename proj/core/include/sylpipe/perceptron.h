#ifndef SYLPIPE_PERCEPTRON_H_
#define SYLPIPE_PERCEPTRON_H_

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sylpipe {

class BinaryReader;
class BinaryWriter;

// String -> dense id map. Grows during training; lookups of unknown strings
// on a frozen alphabet return -1.
class FeatureAlphabet {
 public:
  int Find(std::string_view name) const;
  // Returns the id of `name`, adding it unless the alphabet is frozen.
  int FindOrAdd(std::string_view name);

  void Freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int id) const { return names_[id]; }

  void Write(BinaryWriter& out) const;
  static FeatureAlphabet Read(BinaryReader& in);

 private:
  struct Hash {
    using is_transparent = void;
    size_t operator()(std::string_view s) const { return std::hash<std::string_view>()(s); }
  };
  std::unordered_map<std::string, int, Hash, std::equal_to<>> ids_;
  std::vector<std::string> names_;
  bool frozen_ = false;
};

// Dense (row x class) weight matrix with averaged-perceptron bookkeeping.
//
// Averaging uses the lazy trick: every update of `delta` made while `steps`
// instances have been completed also adds steps*delta to a shadow matrix, and
// the average over the post-instance weight vectors is w - shadow/steps.
class AveragedWeights {
 public:
  explicit AveragedWeights(int num_classes = 1) : classes_(num_classes) {}

  int num_classes() const { return classes_; }
  int num_rows() const { return classes_ == 0 ? 0 : static_cast<int>(w_.size() / classes_); }
  void Resize(int rows);

  void Update(int row, int cls, double delta) {
    const size_t k = static_cast<size_t>(row) * classes_ + cls;
    w_[k] += delta;
    shadow_[k] += steps_ * delta;
  }
  // Marks the end of one training instance.
  void Tick() { ++steps_; }
  int64_t steps() const { return steps_; }

  double raw(int row, int cls) const { return w_[static_cast<size_t>(row) * classes_ + cls]; }
  const std::vector<double>& raw_weights() const { return w_; }
  // Averaged weights in the same row-major layout. Equals the raw weights
  // before the first Tick().
  std::vector<double> Averaged() const;

  void Reset();

 private:
  int classes_;
  std::vector<double> w_;
  std::vector<double> shadow_;
  int64_t steps_ = 0;
};

// Writes a row-major matrix as sparse rows: per row a u32 count of non-zero
// entries followed by (u32 class, f64 weight) pairs.
void WriteSparseRows(BinaryWriter& out, const std::vector<double>& weights, int rows,
                     int classes);
std::vector<double> ReadSparseRows(BinaryReader& in, int rows, int classes);

// Fisher-Yates shuffle using raw engine output (std::shuffle and the standard
// distributions are implementation-defined; the engine sequence is not).
void DeterministicShuffle(std::vector<int>& items, std::mt19937_64& rng);

}  // namespace sylpipe

#endif  // SYLPIPE_PERCEPTRON_H_
