#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsi/spectra_io.hpp"

namespace hsi {

struct SplitResult {
    LabeledDataset train;
    LabeledDataset test;
    /// Row indices into the source dataset, ascending; exported for audit.
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    std::uint64_t seed = 0;
};

/// Deterministic per-class split: each class's sample indices are shuffled
/// with the seeded generator (classes in class-index order, one generator
/// for the whole call), then the first ceil(n_c * train_fraction) go to
/// train. Same dataset order + fraction + seed always reproduces the same
/// partition.
SplitResult stratified_split(const LabeledDataset& ds, double train_fraction,
                             std::uint64_t seed);

/// CSV `index,partition` with partition "train" or "test".
void export_split_indices_csv(const SplitResult& split, const std::string& path);

} // namespace hsi
