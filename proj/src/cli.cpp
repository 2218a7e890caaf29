#include "hsi/cli.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>

#include <CLI11.hpp>

#include "hsi/indices.hpp"
#include "hsi/interpret.hpp"
#include "hsi/lda.hpp"
#include "hsi/mlp.hpp"
#include "hsi/render.hpp"
#include "hsi/split.hpp"
#include "hsi/synth.hpp"
#include "hsi/textio.hpp"

namespace hsi {

namespace {

enum class ModelKind { mlp, lda };

ModelKind sniff_model_kind(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open model file '" + path + "'");
    char magic[8] = {};
    f.read(magic, 8);
    const std::string m(magic, 8);
    if (m == "HSMLPv1\n") return ModelKind::mlp;
    if (m == "HSLDAv1\n") return ModelKind::lda;
    throw Error(path + ": not a recognized model file");
}

std::vector<MaterialModel> resolve_materials(const std::string& preset,
                                             const std::string& materials_path,
                                             std::vector<std::size_t>& counts,
                                             WavelengthGrid& grid) {
    std::vector<MaterialModel> models;
    if (!materials_path.empty()) {
        models = load_materials(materials_path);
        grid = vegetation_grid();
        if (counts.empty())
            throw Error("synth: --counts is required with --materials");
    } else if (preset == "vegetation") {
        models = vegetation_preset();
        grid = vegetation_grid();
        if (counts.empty()) counts = vegetation_counts();
    } else if (preset == "polymer") {
        models = polymer_preset();
        grid = polymer_grid();
        if (counts.empty()) counts = polymer_counts();
    } else {
        throw Error("synth: unknown preset '" + preset +
                    "' (expected vegetation or polymer)");
    }
    return models;
}

IndexSpec resolve_index_spec(const std::string& preset_name,
                             const std::string& config_path) {
    if (!config_path.empty()) return load_index_spec(config_path);
    const auto& presets = index_presets();
    auto it = presets.find(preset_name);
    if (it == presets.end())
        throw Error("unknown index preset '" + preset_name + "'");
    return it->second;
}

// Per-line prediction over a cube, MLP or LDA.
std::vector<int> classify_cube(const SpectralCube& cube, ModelKind kind,
                               const MlpModel* mlp, const LdaModel* lda) {
    const std::size_t bands = cube.bands();
    const std::size_t expect = kind == ModelKind::mlp ? mlp->bands() : lda->bands();
    if (bands != expect)
        throw Error("cube has " + std::to_string(bands) + " bands, model expects " +
                    std::to_string(expect));
    std::vector<int> labels(cube.pixel_count());
    Matrix row_mat(cube.samples, bands);
    for (std::size_t l = 0; l < cube.lines; ++l) {
        for (std::size_t s = 0; s < cube.samples; ++s) {
            const auto px = cube.pixel(l, s);
            auto dst = row_mat.row(s);
            for (std::size_t b = 0; b < bands; ++b)
                dst[b] = static_cast<double>(px[b]);
        }
        const auto pred = kind == ModelKind::mlp ? predict(*mlp, row_mat)
                                                 : predict_lda(*lda, row_mat);
        std::copy(pred.begin(), pred.end(), labels.begin() +
                                                static_cast<std::ptrdiff_t>(l * cube.samples));
    }
    return labels;
}

std::string sanitize_filename(const std::string& name) {
    std::string out = name;
    for (char& c : out)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'))
            c = '_';
    return out;
}

struct SynthArgs {
    std::string preset = "vegetation";
    std::string materials_path;
    std::vector<std::size_t> counts;
    std::uint64_t seed = 0;
    std::string out_csv;
    std::string cube_out, hdr_out, truth_out;
    std::string interleave = "bsq";
    std::size_t lines = 0, samples = 0;
};

void cmd_synth(const SynthArgs& a, std::ostream& out) {
    if (a.out_csv.empty() && a.cube_out.empty())
        throw Error("synth: nothing to do (need --out and/or --cube-out)");
    std::vector<std::size_t> counts = a.counts;
    WavelengthGrid grid;
    const auto models = resolve_materials(a.preset, a.materials_path, counts, grid);
    if (counts.size() != models.size())
        throw Error("synth: got " + std::to_string(counts.size()) + " counts for " +
                    std::to_string(models.size()) + " materials");

    if (!a.out_csv.empty()) {
        const auto ds = generate_dataset(models, counts, grid, a.seed);
        save_dataset_csv(ds, a.out_csv);
        out << "wrote " << ds.size() << " samples, " << ds.class_count()
            << " classes to " << a.out_csv << "\n";
    }
    if (!a.cube_out.empty()) {
        if (a.hdr_out.empty())
            throw Error("synth: --cube-out requires --hdr-out");
        if (a.lines == 0 || a.samples == 0)
            throw Error("synth: --cube-out requires --lines and --samples");
        const auto scene = striped_scene(a.lines, a.samples, models.size());
        auto [cube, truth] = generate_cube(scene, models, grid, a.seed);
        save_cube(cube, a.cube_out, a.hdr_out, parse_interleave(a.interleave));
        if (!a.truth_out.empty()) {
            std::ofstream tf(a.truth_out);
            if (!tf) throw Error("cannot write truth file '" + a.truth_out + "'");
            tf << "line,sample,label\n";
            for (std::size_t l = 0; l < cube.lines; ++l)
                for (std::size_t s = 0; s < cube.samples; ++s)
                    tf << l << ',' << s << ',' << truth[l * cube.samples + s] << '\n';
            if (!tf) throw Error("write failed for '" + a.truth_out + "'");
        }
        out << "wrote " << cube.lines << "x" << cube.samples << "x" << cube.bands()
            << " cube to " << a.cube_out << "\n";
    }
}

struct SplitArgs {
    std::string data;
    double fraction = 0.5;
    std::uint64_t seed = 0;
    std::string train_out, test_out, indices_out;
};

void cmd_split(const SplitArgs& a, std::ostream& out) {
    const auto ds = load_dataset_csv(a.data);
    const auto result = stratified_split(ds, a.fraction, a.seed);
    save_dataset_csv(result.train, a.train_out);
    save_dataset_csv(result.test, a.test_out);
    if (!a.indices_out.empty()) export_split_indices_csv(result, a.indices_out);
    out << "split " << ds.size() << " samples into " << result.train.size()
        << " train / " << result.test.size() << " test\n";
}

struct TrainArgs {
    std::string data, model_out;
    std::string classifier = "mlp";
    MlpConfig cfg;
    bool seed_given = false;
    double lda_shrinkage = 0.1;
};

void cmd_train(const TrainArgs& a, std::ostream& out) {
    const auto ds = load_dataset_csv(a.data);
    if (a.classifier == "mlp") {
        if (!a.seed_given)
            throw Error("train: --seed is required (mlp training is randomized)");
        const auto [model, report] = train(ds, a.cfg);
        save_model(model, a.model_out);
        out << "final epoch loss " << format_fixed(report.epoch_loss.back(), 4)
            << "\n";
        out << "train accuracy " << format_fixed(report.train_accuracy, 4) << "\n";
    } else if (a.classifier == "lda") {
        const auto model = fit_lda(ds, a.lda_shrinkage);
        save_lda(model, a.model_out);
        out << "train accuracy " << format_fixed(lda_accuracy(model, ds), 4) << "\n";
    } else {
        throw Error("train: unknown classifier '" + a.classifier +
                    "' (expected mlp or lda)");
    }
}

void cmd_eval(const std::string& model_path, const std::string& data_path,
              std::ostream& out) {
    const auto ds = load_dataset_csv(data_path);
    double acc = 0.0;
    if (sniff_model_kind(model_path) == ModelKind::mlp)
        acc = accuracy(load_model(model_path), ds);
    else
        acc = lda_accuracy(load_lda(model_path), ds);
    out << "accuracy " << format_fixed(acc, 4) << "\n";
}

struct ClassifyArgs {
    std::string model, cube, hdr, map_out;
};

void cmd_classify(const ClassifyArgs& a, std::ostream& out) {
    const auto cube = load_cube(a.cube, a.hdr);
    const auto kind = sniff_model_kind(a.model);
    MlpModel mlp;
    LdaModel lda;
    std::size_t n_classes = 0;
    if (kind == ModelKind::mlp) {
        mlp = load_model(a.model);
        n_classes = mlp.class_count();
    } else {
        lda = load_lda(a.model);
        n_classes = lda.class_count();
    }
    const auto labels = classify_cube(cube, kind, &mlp, &lda);
    write_class_map(labels, cube.lines, cube.samples, Palette::default_for(n_classes),
                    a.map_out);
    out << "wrote class map " << a.map_out << "\n";
}

struct NdviArgs {
    std::string cube, hdr;
    std::string index_preset = "landsat8";
    std::string index_config;
    std::string map_out, csv_out;
};

void cmd_ndvi(const NdviArgs& a, std::ostream& out) {
    if (a.map_out.empty() && a.csv_out.empty())
        throw Error("ndvi: nothing to do (need --map-out and/or --csv-out)");
    const auto cube = load_cube(a.cube, a.hdr);
    const auto spec = resolve_index_spec(a.index_preset, a.index_config);
    const auto values = index_map(cube, spec);
    if (!a.map_out.empty()) {
        write_index_map(values, cube.lines, cube.samples, a.map_out);
        out << "wrote index map " << a.map_out << "\n";
    }
    if (!a.csv_out.empty()) {
        std::ofstream f(a.csv_out);
        if (!f) throw Error("cannot write index file '" + a.csv_out + "'");
        f << "line,sample," << spec.name << "\n";
        for (std::size_t l = 0; l < cube.lines; ++l)
            for (std::size_t s = 0; s < cube.samples; ++s)
                f << l << ',' << s << ',' << format_double(values[l * cube.samples + s])
                  << '\n';
        if (!f) throw Error("write failed for '" + a.csv_out + "'");
        out << "wrote index values " << a.csv_out << "\n";
    }
}

struct InterpretArgs {
    std::string model, data, out_dir;
    std::size_t k = 10;
    double red_nm = 656.0;
    double nir_nm = 802.0;
};

void cmd_interpret(const InterpretArgs& a, std::ostream& out) {
    const auto model = load_model(a.model);
    const auto ds = load_dataset_csv(a.data);
    if (ds.bands() != model.bands())
        throw Error("interpret: dataset has " + std::to_string(ds.bands()) +
                    " bands, model expects " + std::to_string(model.bands()));

    std::filesystem::create_directories(a.out_dir);
    const auto dir = std::filesystem::path(a.out_dir);

    // Dataset class means, reordered to the model's class order.
    const auto ds_means = class_mean_spectra(ds);
    Matrix means(model.class_count(), model.bands());
    for (std::size_t c = 0; c < model.class_count(); ++c) {
        auto it = std::find(ds.class_names.begin(), ds.class_names.end(),
                            model.class_names[c]);
        if (it == ds.class_names.end())
            throw Error("interpret: dataset lacks class '" + model.class_names[c] + "'");
        const auto src = ds_means.row(
            static_cast<std::size_t>(it - ds.class_names.begin()));
        std::copy(src.begin(), src.end(), means.row(c).begin());
    }

    for (std::size_t c = 0; c < model.class_count(); ++c) {
        const auto profile = top_k_profile(model, static_cast<int>(c), a.k);
        const auto path =
            dir / ("profile_" + sanitize_filename(model.class_names[c]) + ".csv");
        export_profile_csv(profile, means.row(c), model.grid, path.string());
    }

    const auto assignments = assign_neurons(model);
    {
        std::ofstream f(dir / "assignments.csv");
        if (!f) throw Error("cannot write assignments.csv");
        f << "neuron_index,assigned_class,class_name,assignment_weight\n";
        for (const auto& na : assignments)
            f << na.neuron_index << ',' << na.assigned_class << ','
              << model.class_names[static_cast<std::size_t>(na.assigned_class)] << ','
              << format_double(na.assignment_weight) << '\n';
        if (!f) throw Error("write failed for assignments.csv");
    }

    write_weight_heatmap(model.w1, sort_neurons_for_display(model),
                         (dir / "heatmap.ppm").string());

    const auto predicted = predict(model, ds.spectra);
    export_scatter_csv(ds.spectra, predicted, model.class_names, model.grid, a.red_nm,
                       a.nir_nm, (dir / "scatter.csv").string());

    const auto report =
        ndvi_geometry_check(predicted, ds.spectra, model.grid, a.red_nm, a.nir_nm);
    {
        std::ofstream f(dir / "geometry.csv");
        if (!f) throw Error("cannot write geometry.csv");
        f << "class_a,class_b,separation_fraction,slope,implied_ndvi\n";
        for (const auto& p : report.pairs)
            f << model.class_names[static_cast<std::size_t>(p.class_a)] << ','
              << model.class_names[static_cast<std::size_t>(p.class_b)] << ','
              << format_double(p.separation) << ',' << format_double(p.slope) << ','
              << format_double(p.implied_ndvi) << '\n';
        if (!f) throw Error("write failed for geometry.csv");
    }
    for (const auto& p : report.pairs)
        out << "separation " << model.class_names[static_cast<std::size_t>(p.class_a)]
            << "/" << model.class_names[static_cast<std::size_t>(p.class_b)] << " "
            << format_fixed(p.separation, 4) << " slope "
            << format_fixed(p.slope, 4) << "\n";
    out << "wrote " << model.class_count() << " profiles to " << a.out_dir << "\n";
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"hyperspectral classification and weight-inspection toolkit"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate synthetic spectra");
    synth->add_option("--preset", synth_args.preset, "vegetation or polymer");
    synth->add_option("--materials", synth_args.materials_path,
                      "materials JSON instead of a preset");
    synth->add_option("--counts", synth_args.counts, "per-class sample counts")
        ->delimiter(',');
    synth->add_option("--seed", synth_args.seed, "generator seed")->required();
    synth->add_option("--out", synth_args.out_csv, "dataset CSV path");
    synth->add_option("--cube-out", synth_args.cube_out, "raster path");
    synth->add_option("--hdr-out", synth_args.hdr_out, "raster header path");
    synth->add_option("--truth-out", synth_args.truth_out, "cube truth-label CSV");
    synth->add_option("--interleave", synth_args.interleave, "bsq, bil or bip");
    synth->add_option("--lines", synth_args.lines, "cube lines");
    synth->add_option("--samples", synth_args.samples, "cube samples");

    SplitArgs split_args;
    auto* split = app.add_subcommand("split", "stratified train/test split");
    split->add_option("--data", split_args.data, "dataset CSV")->required();
    split->add_option("--fraction", split_args.fraction, "train fraction")
        ->required();
    split->add_option("--seed", split_args.seed, "shuffle seed")->required();
    split->add_option("--train-out", split_args.train_out, "train CSV")->required();
    split->add_option("--test-out", split_args.test_out, "test CSV")->required();
    split->add_option("--indices-out", split_args.indices_out, "partition audit CSV");

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "fit a classifier");
    train_cmd->add_option("--data", train_args.data, "training CSV")->required();
    train_cmd->add_option("--model-out", train_args.model_out, "model path")
        ->required();
    train_cmd->add_option("--classifier", train_args.classifier, "mlp or lda");
    train_cmd->add_option("--hidden", train_args.cfg.hidden_units, "hidden units");
    train_cmd->add_option("--dropout", train_args.cfg.dropout_rate, "dropout rate");
    train_cmd->add_option("--epochs", train_args.cfg.epochs, "training epochs");
    train_cmd->add_option("--batch", train_args.cfg.batch_size, "batch size");
    train_cmd->add_option("--lr", train_args.cfg.learning_rate, "learning rate");
    auto* seed_opt = train_cmd->add_option("--seed", train_args.cfg.seed,
                                           "init/shuffle/dropout seed");
    train_cmd->add_option("--lda-shrinkage", train_args.lda_shrinkage,
                          "LDA covariance shrinkage in [0, 1]");

    std::string eval_model, eval_data;
    auto* eval_cmd = app.add_subcommand("eval", "report accuracy on a dataset");
    eval_cmd->add_option("--model", eval_model, "model path")->required();
    eval_cmd->add_option("--data", eval_data, "dataset CSV")->required();

    ClassifyArgs classify_args;
    auto* classify = app.add_subcommand("classify", "per-pixel class map");
    classify->add_option("--model", classify_args.model, "model path")->required();
    classify->add_option("--cube", classify_args.cube, "raster path")->required();
    classify->add_option("--hdr", classify_args.hdr, "raster header path")->required();
    classify->add_option("--map-out", classify_args.map_out, "PPM path")->required();

    NdviArgs ndvi_args;
    auto* ndvi_cmd = app.add_subcommand("ndvi", "normalized-difference index map");
    ndvi_cmd->add_option("--cube", ndvi_args.cube, "raster path")->required();
    ndvi_cmd->add_option("--hdr", ndvi_args.hdr, "raster header path")->required();
    ndvi_cmd->add_option("--index", ndvi_args.index_preset, "index preset name");
    ndvi_cmd->add_option("--index-config", ndvi_args.index_config, "index JSON");
    ndvi_cmd->add_option("--map-out", ndvi_args.map_out, "PPM path");
    ndvi_cmd->add_option("--csv-out", ndvi_args.csv_out, "per-pixel CSV path");

    InterpretArgs interpret_args;
    auto* interpret = app.add_subcommand("interpret", "weight-inspection artifacts");
    interpret->add_option("--model", interpret_args.model, "model path")->required();
    interpret->add_option("--data", interpret_args.data, "dataset CSV")->required();
    interpret->add_option("--k", interpret_args.k, "top neurons per class");
    interpret->add_option("--out-dir", interpret_args.out_dir, "output directory")
        ->required();
    interpret->add_option("--red-nm", interpret_args.red_nm, "scatter x wavelength");
    interpret->add_option("--nir-nm", interpret_args.nir_nm, "scatter y wavelength");

    std::vector<const char*> argv;
    argv.push_back("hsi");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        train_args.seed_given = seed_opt->count() > 0;
        if (synth->parsed()) cmd_synth(synth_args, out);
        if (split->parsed()) cmd_split(split_args, out);
        if (train_cmd->parsed()) cmd_train(train_args, out);
        if (eval_cmd->parsed()) cmd_eval(eval_model, eval_data, out);
        if (classify->parsed()) cmd_classify(classify_args, out);
        if (ndvi_cmd->parsed()) cmd_ndvi(ndvi_args, out);
        if (interpret->parsed()) cmd_interpret(interpret_args, out);
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace hsi
