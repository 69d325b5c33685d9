#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "infospec/ann.hpp"
#include "infospec/core.hpp"
#include "infospec/eval.hpp"
#include "infospec/fit.hpp"
#include "infospec/synth.hpp"

namespace infospec::io {

using nlohmann::json;

inline constexpr int kModelFormatVersion = 1;
inline constexpr int kNetworkFormatVersion = 1;

/// Shortest decimal that round-trips (17 significant digits at most).
std::string format_number(double v);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Spectrum CSV: header `ppm,<value_name>`, one row per channel.
void write_spectrum_csv(std::ostream& os, const PpmGrid& grid, std::span<const double> values,
                        std::string_view value_name = "intensity");
Spectrum read_spectrum_csv(std::istream& is);
Spectrum read_spectrum_csv(const std::filesystem::path& path);
void write_information_csv(std::ostream& os, const InformationSpectrum& fis);

json to_json(const PpmGrid& grid);
PpmGrid grid_from_json(const json& j);

json to_json(const SpectrumLibrary& lib);
SpectrumLibrary library_from_json(const json& j);
SpectrumLibrary read_library(const std::filesystem::path& path);

json to_json(const FitModel& model);
FitModel model_from_json(const json& j);

json to_json(const DistanceReport& r);
DistanceReport distance_report_from_json(const json& j);
json to_json(const BayesReport& r);
BayesReport bayes_report_from_json(const json& j);

/// `set,i,j,correlation` rows for every intra then inter entry.
void write_samples_csv(std::ostream& os, const IndexPartition& part, std::span<const double> intra,
                       std::span<const double> inter);

json to_json(const MlpNetwork& net);
MlpNetwork network_from_json(const json& j);

/// `epoch,max_bit_error`, epochs numbered from 1.
void write_curve_csv(std::ostream& os, const LearningCurve& curve);

json to_json(const VariationConfig& var);
/// Missing keys keep the defaults of `base`.
VariationConfig variation_from_json(const json& j, VariationConfig base = {});

/// Text of `j` with a trailing newline.
std::string dump(const json& j);

}  // namespace infospec::io
