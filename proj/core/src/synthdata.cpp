#include "dvnet/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dvnet/error.hpp"
#include "dvnet/rng.hpp"
#include "dvnet/version.hpp"

namespace dvnet {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kRayleighMean = 1.2533141373155003;  // sqrt(pi/2)

double wrap_angle(double a) {
    while (a > kPi) a -= 2.0 * kPi;
    while (a < -kPi) a += 2.0 * kPi;
    return a;
}

double smoothstep01(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

struct BoundaryModel {
    std::vector<double> harmonic_amp;    // k = 5..9
    std::vector<double> harmonic_phase;
    std::vector<double> spicule_angle;
    std::vector<double> spicule_gain;    // normalized radial extension
    double spicule_halfwidth = 0.14;

    double modulation(double theta) const {
        double m = 1.0;
        for (std::size_t k = 0; k < harmonic_amp.size(); ++k) {
            m += harmonic_amp[k] * std::cos(static_cast<double>(k + 5) * theta + harmonic_phase[k]);
        }
        for (std::size_t s = 0; s < spicule_angle.size(); ++s) {
            const double d = std::abs(wrap_angle(theta - spicule_angle[s]));
            if (d < spicule_halfwidth) {
                m += spicule_gain[s] * (1.0 - d / spicule_halfwidth);
            }
        }
        return std::max(m, 0.2);
    }
};

BoundaryModel make_boundary(const LesionParams& p, SplitMix64& rng, double mean_radius,
                            double spicule_scale) {
    BoundaryModel model;
    for (int k = 0; k < 5; ++k) {
        model.harmonic_amp.push_back(p.boundary_roughness * rng.uniform(0.4, 1.0) /
                                     (1.0 + 0.3 * k));
        model.harmonic_phase.push_back(rng.uniform(0.0, 2.0 * kPi));
    }
    if (p.spicule_count > 0) {
        const double step = 2.0 * kPi / p.spicule_count;
        for (int s = 0; s < p.spicule_count; ++s) {
            model.spicule_angle.push_back(wrap_angle(step * s + rng.uniform(-0.3, 0.3) * step));
            const double len = p.spicule_length * spicule_scale * rng.uniform(0.75, 1.25);
            model.spicule_gain.push_back(len / mean_radius);
        }
        model.spicule_halfwidth = 0.10 + 0.06 * rng.next_double();
    }
    return model;
}

GrayImage render_view(const LesionParams& p, double center_u, double center_v, double radius_u,
                      double radius_v, bool posterior_band, std::uint64_t view_tag) {
    SplitMix64 rng(derive_seed(p.seed, view_tag));
    const double mean_radius = 0.5 * (radius_u + radius_v);
    // transverse spicules render attenuated: the burr sign lives mostly in
    // the coronal plane
    const double spicule_scale = view_tag == 1 ? 1.0 : 0.45;
    const BoundaryModel boundary = make_boundary(p, rng, mean_radius, spicule_scale);

    const double edge_width = 0.10;
    GrayImage img(kFrameSize, kFrameSize);
    std::vector<double> field(kFrameSize * kFrameSize);
    double boundary_bottom = center_v;  // deepest lesion row per column midline
    for (std::size_t y = 0; y < kFrameSize; ++y) {
        for (std::size_t x = 0; x < kFrameSize; ++x) {
            const double du = (static_cast<double>(x) - center_u) / radius_u;
            const double dv = (static_cast<double>(y) - center_v) / radius_v;
            const double rho = std::sqrt(du * du + dv * dv);
            const double theta = std::atan2(dv, du);
            const double m = boundary.modulation(theta);
            const double t = (rho - m) / edge_width;
            const double mix = smoothstep01(0.5 * (t + 1.0));
            field[y * kFrameSize + x] =
                static_cast<double>(p.interior_intensity) +
                (static_cast<double>(p.background_intensity) - p.interior_intensity) * mix;
            if (rho <= m) {
                boundary_bottom = std::max(boundary_bottom, static_cast<double>(y));
            }
        }
    }

    if (posterior_band && p.posterior_factor != 1.0) {
        const double half_extent = radius_u * 1.1;
        for (std::size_t y = 0; y < kFrameSize; ++y) {
            const double below = static_cast<double>(y) - boundary_bottom;
            if (below <= 0.0) continue;
            const double fade = std::exp(-below / 14.0);
            for (std::size_t x = 0; x < kFrameSize; ++x) {
                const double lateral = std::abs(static_cast<double>(x) - center_u) / half_extent;
                if (lateral >= 1.0) continue;
                const double taper = smoothstep01(1.0 - lateral);
                const double gain = 1.0 + (p.posterior_factor - 1.0) * fade * taper;
                field[y * kFrameSize + x] *= gain;
            }
        }
    }

    // multiplicative speckle, one draw per pixel in row-major order
    for (std::size_t i = 0; i < field.size(); ++i) {
        const double r = rng.rayleigh(1.0) / kRayleighMean;
        const double v = field[i] * (1.0 + p.speckle_scale * (r - 1.0));
        img.pixels[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
    return img;
}

}  // namespace

const char* difficulty_name(Difficulty d) {
    return d == Difficulty::easy ? "easy" : "standard";
}

Difficulty difficulty_from_name(const std::string& name) {
    if (name == "easy") return Difficulty::easy;
    if (name == "standard") return Difficulty::standard;
    throw ParamError("unknown difficulty '" + name + "'");
}

void LesionParams::validate() const {
    if (lesion_class == LesionClass::benign && spicule_count != 0) {
        throw ParamError("benign lesion must have spicule_count 0");
    }
    if (lesion_class == LesionClass::malignant && spicule_count < 4) {
        throw ParamError("malignant lesion requires spicule_count >= 4");
    }
    const double frame = static_cast<double>(kFrameSize);
    const double margin = 4.0;
    const double reach_u = radius_x * (1.0 + boundary_roughness * 2.0) + spicule_length;
    for (const auto& [c, r] : {std::pair{center_x, reach_u},
                               std::pair{center_y, radius_y * (1.0 + boundary_roughness * 2.0) + spicule_length},
                               std::pair{center_z, radius_z * (1.0 + boundary_roughness * 2.0) + spicule_length}}) {
        if (c - r < margin || c + r > frame - margin) {
            throw ParamError("lesion geometry exceeds the 64x64 frame margin");
        }
    }
    if (interior_intensity < 0 || interior_intensity > 255 || background_intensity < 0 ||
        background_intensity > 255) {
        throw ParamError("intensities must be within 0..255");
    }
    if (speckle_scale < 0.0) throw ParamError("speckle_scale must be >= 0");
}

DualViewSample render_lesion(const LesionParams& params) {
    params.validate();
    DualViewSample sample;
    sample.label = params.lesion_class == LesionClass::malignant ? 1 : 0;
    sample.coronal = render_view(params, params.center_x, params.center_y, params.radius_x,
                                 params.radius_y, false, 1);
    sample.transverse = render_view(params, params.center_x, params.center_z, params.radius_x,
                                    params.radius_z, true, 2);
    return sample;
}

LesionParams sample_lesion_params(LesionClass cls, Difficulty difficulty, std::uint64_t seed) {
    SplitMix64 rng(derive_seed(seed, 0xC0FFEEULL));
    LesionParams p;
    p.lesion_class = cls;
    p.seed = seed;
    p.center_x = rng.uniform(30.0, 34.0);
    p.center_y = rng.uniform(30.0, 34.0);
    p.center_z = rng.uniform(30.0, 34.0);
    p.radius_x = rng.uniform(9.0, 13.5);
    p.radius_y = rng.uniform(8.5, 12.5);
    p.radius_z = rng.uniform(8.5, 12.5);

    const bool malignant = cls == LesionClass::malignant;
    if (difficulty == Difficulty::easy) {
        p.background_intensity = static_cast<int>(rng.uniform(150.0, 170.0));
        p.interior_intensity = static_cast<int>(malignant ? rng.uniform(35.0, 55.0)
                                                          : rng.uniform(105.0, 120.0));
        p.speckle_scale = 0.05;
        if (malignant) {
            p.spicule_count = 8 + static_cast<int>(rng.below(3));
            p.spicule_length = rng.uniform(5.0, 6.5);
            p.boundary_roughness = 0.12;
            p.posterior_factor = rng.uniform(0.50, 0.62);
        } else {
            p.boundary_roughness = 0.015;
            p.posterior_factor = rng.uniform(1.18, 1.30);
        }
    } else {
        p.background_intensity = static_cast<int>(rng.uniform(140.0, 165.0));
        p.interior_intensity = static_cast<int>(malignant ? rng.uniform(62.0, 88.0)
                                                          : rng.uniform(78.0, 100.0));
        p.speckle_scale = 0.16;
        if (malignant) {
            p.spicule_count = 6 + static_cast<int>(rng.below(4));
            p.spicule_length = rng.uniform(3.5, 5.5);
            p.boundary_roughness = 0.08;
            p.posterior_factor = rng.uniform(0.62, 0.82);
        } else {
            p.boundary_roughness = 0.02;
            p.posterior_factor = rng.uniform(1.05, 1.18);
        }
    }
    return p;
}

SynthDataset generate_dataset(std::size_t n_benign, std::size_t n_malignant,
                              Difficulty difficulty, std::uint64_t seed) {
    SynthDataset ds;
    ds.difficulty = difficulty;
    ds.seed = seed;
    ds.benign_count = n_benign;
    ds.malignant_count = n_malignant;
    const std::size_t total = n_benign + n_malignant;
    ds.samples.reserve(total);
    ds.params.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        const LesionClass cls = i < n_benign ? LesionClass::benign : LesionClass::malignant;
        const LesionParams p = sample_lesion_params(cls, difficulty, derive_seed(seed, i));
        ds.params.push_back(p);
        ds.samples.push_back(render_lesion(p));
    }
    // deterministic class interleave
    std::vector<std::size_t> order(total);
    for (std::size_t i = 0; i < total; ++i) order[i] = i;
    SplitMix64 rng(derive_seed(seed, 0x5487F1E2D3C4B5A6ULL));
    rng.shuffle(order);
    SynthDataset shuffled = ds;
    for (std::size_t i = 0; i < total; ++i) {
        shuffled.samples[i] = ds.samples[order[i]];
        shuffled.params[i] = ds.params[order[i]];
    }
    return shuffled;
}

SplitResult split_with_ratio(const SynthDataset& dataset, double test_fraction,
                             double ratio_pos_per_neg, std::uint64_t seed) {
    if (test_fraction <= 0.0 || test_fraction >= 1.0) {
        throw ParamError("split_with_ratio: test_fraction must be in (0,1)");
    }
    if (ratio_pos_per_neg <= 0.0) {
        throw ParamError("split_with_ratio: ratio must be > 0");
    }
    std::vector<std::size_t> pos_idx, neg_idx;
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        (dataset.samples[i].label == 1 ? pos_idx : neg_idx).push_back(i);
    }
    const std::size_t test_per_class = static_cast<std::size_t>(
        test_fraction * static_cast<double>(dataset.samples.size()) / 2.0);
    if (test_per_class == 0) throw ParamError("split_with_ratio: test split would be empty");
    if (pos_idx.size() < test_per_class || neg_idx.size() < test_per_class) {
        throw ParamError("split_with_ratio: not enough samples per class for a balanced test of " +
                         std::to_string(test_per_class) + " each (have " +
                         std::to_string(neg_idx.size()) + " benign, " +
                         std::to_string(pos_idx.size()) + " malignant)");
    }

    // test selection depends only on (dataset, test_fraction, seed): it is
    // identical across ratio settings
    SplitMix64 pos_rng(derive_seed(seed, 0xB01DFACEULL));
    SplitMix64 neg_rng(derive_seed(seed, 0xFADEDBEEULL));
    pos_rng.shuffle(pos_idx);
    neg_rng.shuffle(neg_idx);

    SplitResult result;
    for (std::size_t i = 0; i < test_per_class; ++i) {
        result.test_indices.push_back(pos_idx[i]);
        result.test_indices.push_back(neg_idx[i]);
    }
    std::vector<std::size_t> pool_pos(pos_idx.begin() + static_cast<long>(test_per_class), pos_idx.end());
    std::vector<std::size_t> pool_neg(neg_idx.begin() + static_cast<long>(test_per_class), neg_idx.end());

    // negatives set the scale
    std::size_t n_neg = std::min(pool_neg.size(),
                                 static_cast<std::size_t>(static_cast<double>(pool_pos.size()) /
                                                          ratio_pos_per_neg));
    std::size_t n_pos = static_cast<std::size_t>(ratio_pos_per_neg * static_cast<double>(n_neg));
    n_pos = std::min(n_pos, pool_pos.size());
    if (n_neg == 0 || n_pos == 0) {
        throw ParamError("split_with_ratio: ratio " + std::to_string(ratio_pos_per_neg) +
                         " infeasible with pool of " + std::to_string(pool_pos.size()) +
                         " positives / " + std::to_string(pool_neg.size()) + " negatives");
    }
    for (std::size_t i = 0; i < n_pos; ++i) result.train_indices.push_back(pool_pos[i]);
    for (std::size_t i = 0; i < n_neg; ++i) result.train_indices.push_back(pool_neg[i]);
    SplitMix64 order_rng(derive_seed(seed, 0x715EC0DEULL));
    order_rng.shuffle(result.train_indices);

    auto subset = [&](const std::vector<std::size_t>& indices) {
        SynthDataset out;
        out.difficulty = dataset.difficulty;
        out.seed = dataset.seed;
        for (std::size_t i : indices) {
            out.samples.push_back(dataset.samples[i]);
            out.params.push_back(dataset.params[i]);
            if (dataset.samples[i].label == 1) {
                ++out.malignant_count;
            } else {
                ++out.benign_count;
            }
        }
        return out;
    };
    result.train = subset(result.train_indices);
    result.test = subset(result.test_indices);
    std::ostringstream id;
    id << "seed" << seed << "/test" << test_fraction << "/ratio" << ratio_pos_per_neg;
    result.split_id = id.str();
    return result;
}

SplitResult stratified_split(const SynthDataset& dataset, double test_fraction,
                             std::uint64_t seed) {
    if (test_fraction <= 0.0 || test_fraction >= 1.0) {
        throw ParamError("stratified_split: test_fraction must be in (0,1)");
    }
    std::vector<std::size_t> pos_idx, neg_idx;
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        (dataset.samples[i].label == 1 ? pos_idx : neg_idx).push_back(i);
    }
    SplitMix64 pos_rng(derive_seed(seed, 0xB01DFACEULL));
    SplitMix64 neg_rng(derive_seed(seed, 0xFADEDBEEULL));
    pos_rng.shuffle(pos_idx);
    neg_rng.shuffle(neg_idx);

    SplitResult result;
    auto take = [&](std::vector<std::size_t>& idx) {
        const std::size_t n_test = static_cast<std::size_t>(
            std::lround(test_fraction * static_cast<double>(idx.size())));
        if (n_test == 0 || n_test >= idx.size()) {
            throw ParamError("stratified_split: a class would be empty in train or test");
        }
        for (std::size_t i = 0; i < idx.size(); ++i) {
            (i < n_test ? result.test_indices : result.train_indices).push_back(idx[i]);
        }
    };
    take(pos_idx);
    take(neg_idx);
    SplitMix64 order_rng(derive_seed(seed, 0x715EC0DEULL));
    order_rng.shuffle(result.train_indices);
    order_rng.shuffle(result.test_indices);

    auto subset = [&](const std::vector<std::size_t>& indices) {
        SynthDataset out;
        out.difficulty = dataset.difficulty;
        out.seed = dataset.seed;
        for (std::size_t i : indices) {
            out.samples.push_back(dataset.samples[i]);
            out.params.push_back(dataset.params[i]);
            if (dataset.samples[i].label == 1) {
                ++out.malignant_count;
            } else {
                ++out.benign_count;
            }
        }
        return out;
    };
    result.train = subset(result.train_indices);
    result.test = subset(result.test_indices);
    std::ostringstream id;
    id << "seed" << seed << "/test" << test_fraction << "/stratified";
    result.split_id = id.str();
    return result;
}

namespace {

nlohmann::ordered_json params_to_json(const LesionParams& p) {
    nlohmann::ordered_json j;
    j["class"] = p.lesion_class == LesionClass::malignant ? "malignant" : "benign";
    j["seed"] = p.seed;
    j["center"] = {p.center_x, p.center_y, p.center_z};
    j["radii"] = {p.radius_x, p.radius_y, p.radius_z};
    j["spicule_count"] = p.spicule_count;
    j["spicule_length"] = p.spicule_length;
    j["boundary_roughness"] = p.boundary_roughness;
    j["posterior_factor"] = p.posterior_factor;
    j["interior_intensity"] = p.interior_intensity;
    j["background_intensity"] = p.background_intensity;
    j["speckle_scale"] = p.speckle_scale;
    return j;
}

LesionParams params_from_json(const nlohmann::json& j) {
    LesionParams p;
    p.lesion_class = j.at("class") == "malignant" ? LesionClass::malignant : LesionClass::benign;
    p.seed = j.at("seed").get<std::uint64_t>();
    p.center_x = j.at("center")[0];
    p.center_y = j.at("center")[1];
    p.center_z = j.at("center")[2];
    p.radius_x = j.at("radii")[0];
    p.radius_y = j.at("radii")[1];
    p.radius_z = j.at("radii")[2];
    p.spicule_count = j.at("spicule_count");
    p.spicule_length = j.at("spicule_length");
    p.boundary_roughness = j.at("boundary_roughness");
    p.posterior_factor = j.at("posterior_factor");
    p.interior_intensity = j.at("interior_intensity");
    p.background_intensity = j.at("background_intensity");
    p.speckle_scale = j.at("speckle_scale");
    return p;
}

std::string sample_stem(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04zu", index);
    return buf;
}

}  // namespace

void export_dataset(const SynthDataset& dataset, const std::string& dir,
                    const std::string& split_name) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    nlohmann::ordered_json manifest;
    manifest["version"] = kVersion;
    manifest["seed"] = dataset.seed;
    manifest["difficulty"] = difficulty_name(dataset.difficulty);
    manifest["benign_count"] = dataset.benign_count;
    manifest["malignant_count"] = dataset.malignant_count;
    manifest["samples"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        const DualViewSample& sample = dataset.samples[i];
        const std::string label = sample.label == 1 ? "malignant" : "benign";
        const fs::path sub = fs::path(dir) / split_name / label;
        fs::create_directories(sub);
        const std::string stem = sample_stem(i);
        write_pgm(sample.coronal, (sub / (stem + "_coronal.pgm")).string());
        write_pgm(sample.transverse, (sub / (stem + "_transverse.pgm")).string());
        nlohmann::ordered_json entry = params_to_json(dataset.params[i]);
        entry["index"] = i;
        entry["split"] = split_name;
        manifest["samples"].push_back(entry);
    }
    std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
    if (!out) throw IoError("cannot write manifest.json under '" + dir + "'");
    out << manifest.dump(2) << '\n';
}

SynthDataset load_dataset(const std::string& dir) {
    namespace fs = std::filesystem;
    const fs::path manifest_path = fs::path(dir) / "manifest.json";
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + manifest_path.string() + "'");
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("manifest.json: ") + e.what(), 0);
    }
    SynthDataset ds;
    ds.seed = manifest.at("seed").get<std::uint64_t>();
    ds.difficulty = difficulty_from_name(manifest.at("difficulty").get<std::string>());
    ds.benign_count = manifest.at("benign_count").get<std::size_t>();
    ds.malignant_count = manifest.at("malignant_count").get<std::size_t>();
    for (const auto& entry : manifest.at("samples")) {
        const LesionParams p = params_from_json(entry);
        const std::size_t index = entry.at("index").get<std::size_t>();
        const std::string split = entry.at("split").get<std::string>();
        const std::string label = p.lesion_class == LesionClass::malignant ? "malignant" : "benign";
        const fs::path sub = fs::path(dir) / split / label;
        const std::string stem = sample_stem(index);
        DualViewSample sample;
        sample.label = p.lesion_class == LesionClass::malignant ? 1 : 0;
        sample.coronal = read_pgm((sub / (stem + "_coronal.pgm")).string());
        sample.transverse = read_pgm((sub / (stem + "_transverse.pgm")).string());
        ds.params.push_back(p);
        ds.samples.push_back(std::move(sample));
    }
    return ds;
}

}  // namespace dvnet
