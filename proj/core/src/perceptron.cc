#include "sylpipe/perceptron.h"

#include <cmath>

#include "sylpipe/binary_io.h"
#include "sylpipe/errors.h"

namespace sylpipe {

int FeatureAlphabet::Find(std::string_view name) const {
  auto it = ids_.find(name);
  return it == ids_.end() ? -1 : it->second;
}

int FeatureAlphabet::FindOrAdd(std::string_view name) {
  auto it = ids_.find(name);
  if (it != ids_.end()) return it->second;
  if (frozen_) return -1;
  int id = static_cast<int>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

void FeatureAlphabet::Write(BinaryWriter& out) const {
  out.U32(static_cast<uint32_t>(names_.size()));
  for (const std::string& n : names_) out.Str(n);
}

FeatureAlphabet FeatureAlphabet::Read(BinaryReader& in) {
  FeatureAlphabet alphabet;
  uint32_t n = in.U32();
  alphabet.names_.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    std::string name = in.Str();
    if (alphabet.FindOrAdd(name) != static_cast<int>(i)) {
      throw ModelError("duplicate feature name in model file: " + name);
    }
  }
  alphabet.Freeze();
  return alphabet;
}

void AveragedWeights::Resize(int rows) {
  const size_t n = static_cast<size_t>(rows) * classes_;
  if (n > w_.size()) {
    w_.resize(n, 0.0);
    shadow_.resize(n, 0.0);
  }
}

std::vector<double> AveragedWeights::Averaged() const {
  if (steps_ == 0) return w_;
  std::vector<double> avg(w_.size());
  const double inv = 1.0 / static_cast<double>(steps_);
  for (size_t i = 0; i < w_.size(); ++i) avg[i] = w_[i] - shadow_[i] * inv;
  return avg;
}

void AveragedWeights::Reset() {
  std::fill(w_.begin(), w_.end(), 0.0);
  std::fill(shadow_.begin(), shadow_.end(), 0.0);
  steps_ = 0;
}

void WriteSparseRows(BinaryWriter& out, const std::vector<double>& weights, int rows,
                     int classes) {
  for (int r = 0; r < rows; ++r) {
    const double* row = weights.data() + static_cast<size_t>(r) * classes;
    uint32_t nonzero = 0;
    for (int c = 0; c < classes; ++c) nonzero += row[c] != 0.0;
    out.U32(nonzero);
    for (int c = 0; c < classes; ++c) {
      if (row[c] == 0.0) continue;
      out.U32(static_cast<uint32_t>(c));
      out.F64(row[c]);
    }
  }
}

std::vector<double> ReadSparseRows(BinaryReader& in, int rows, int classes) {
  std::vector<double> weights(static_cast<size_t>(rows) * classes, 0.0);
  for (int r = 0; r < rows; ++r) {
    uint32_t nonzero = in.U32();
    if (nonzero > static_cast<uint32_t>(classes)) throw ModelError("corrupt weight row");
    for (uint32_t k = 0; k < nonzero; ++k) {
      uint32_t c = in.U32();
      double w = in.F64();
      if (c >= static_cast<uint32_t>(classes) || !std::isfinite(w)) {
        throw ModelError("corrupt weight entry");
      }
      weights[static_cast<size_t>(r) * classes + c] = w;
    }
  }
  return weights;
}

void DeterministicShuffle(std::vector<int>& items, std::mt19937_64& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = rng() % i;
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace sylpipe
