#include "hsi/split.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "hsi/rng.hpp"

namespace hsi {

namespace {

LabeledDataset take_rows(const LabeledDataset& ds, const std::vector<std::size_t>& rows) {
    LabeledDataset out;
    out.grid = ds.grid;
    out.class_names = ds.class_names;
    out.spectra = Matrix(rows.size(), ds.bands());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto src = ds.spectra.row(rows[i]);
        std::copy(src.begin(), src.end(), out.spectra.row(i).begin());
        out.labels.push_back(ds.labels[rows[i]]);
    }
    return out;
}

} // namespace

SplitResult stratified_split(const LabeledDataset& ds, double train_fraction,
                             std::uint64_t seed) {
    ds.validate();
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error("stratified_split: train fraction must be in (0, 1)");

    const std::size_t nc = ds.class_count();
    std::vector<std::vector<std::size_t>> per_class(nc);
    for (std::size_t i = 0; i < ds.size(); ++i)
        per_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
    for (std::size_t c = 0; c < nc; ++c)
        if (per_class[c].size() < 2)
            throw Error("stratified_split: class '" + ds.class_names[c] +
                        "' has fewer than 2 samples");

    Rng rng(seed);
    SplitResult result;
    result.seed = seed;
    for (std::size_t c = 0; c < nc; ++c) {
        auto& idx = per_class[c];
        rng.shuffle(idx);
        // ceil(n_c * fraction), with a nudge so exact products such as
        // 10 * 0.1 do not round up through floating-point residue.
        const double t = static_cast<double>(idx.size()) * train_fraction;
        auto n_train = static_cast<std::size_t>(std::ceil(t - 1e-9));
        n_train = std::min(std::max<std::size_t>(n_train, 1), idx.size());
        result.train_indices.insert(result.train_indices.end(), idx.begin(),
                                    idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        result.test_indices.insert(result.test_indices.end(),
                                   idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                                   idx.end());
    }
    std::sort(result.train_indices.begin(), result.train_indices.end());
    std::sort(result.test_indices.begin(), result.test_indices.end());
    result.train = take_rows(ds, result.train_indices);
    result.test = take_rows(ds, result.test_indices);
    return result;
}

void export_split_indices_csv(const SplitResult& split, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write split index file '" + path + "'");
    out << "index,partition\n";
    std::size_t ti = 0, ei = 0;
    const auto& tr = split.train_indices;
    const auto& te = split.test_indices;
    while (ti < tr.size() || ei < te.size()) {
        if (ei >= te.size() || (ti < tr.size() && tr[ti] < te[ei]))
            out << tr[ti++] << ",train\n";
        else
            out << te[ei++] << ",test\n";
    }
    if (!out) throw Error("write failed for '" + path + "'");
}

} // namespace hsi
