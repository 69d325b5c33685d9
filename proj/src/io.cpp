#include "infospec/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace infospec::io {

namespace {

template <typename F>
auto parsing(std::string_view what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(Errc::kParse, std::string(what) + ": " + e.what());
  }
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& field, std::size_t line) {
  const std::string t = trim(field);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size())
    throw Error(Errc::kParse, "line " + std::to_string(line) + ": '" + t + "' is not a number");
  return v;
}

Matrix matrix_from_flat(const json& flat, std::size_t rows, std::size_t cols, const char* name) {
  const auto values = flat.get<std::vector<double>>();
  if (values.size() != rows * cols)
    throw Error(Errc::kParse, std::string(name) + " has " + std::to_string(values.size()) +
                                  " values, expected " + std::to_string(rows * cols));
  Matrix m(rows, cols);
  std::copy(values.begin(), values.end(), m.data().begin());
  return m;
}

json histogram_json(const ChannelHistogram& h) { return json{{"counts", h.counts}, {"total", h.total}}; }

ChannelHistogram histogram_from_json(const json& j) {
  return {j.at("counts").get<std::vector<std::uint32_t>>(), j.at("total").get<std::uint32_t>()};
}

json range_json(const Range& r) { return json::array({r.lo, r.hi}); }

Range range_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), j.get<double>()};
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 2) throw Error(Errc::kParse, "range must be [lo, hi] or a single number");
  return {v[0], v[1]};
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIo, "cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(Errc::kIo, "write to '" + path.string() + "' failed");
}

std::string dump(const json& j) { return j.dump() + "\n"; }

// --- CSV ---------------------------------------------------------------------

void write_spectrum_csv(std::ostream& os, const PpmGrid& grid, std::span<const double> values,
                        std::string_view value_name) {
  if (values.size() != grid.size()) throw Error(Errc::kLengthMismatch, "values do not match grid");
  os << "ppm," << value_name << '\n';
  for (std::size_t c = 0; c < values.size(); ++c)
    os << format_number(grid.ppm_at(c)) << ',' << format_number(values[c]) << '\n';
}

void write_information_csv(std::ostream& os, const InformationSpectrum& fis) {
  write_spectrum_csv(os, fis.grid, fis.info, "information");
}

Spectrum read_spectrum_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(Errc::kParse, "empty spectrum CSV");
  const std::string header = trim(line);
  if (header.rfind("ppm,", 0) != 0)
    throw Error(Errc::kParse, "spectrum CSV header must start with 'ppm,', got '" + header + "'");

  std::vector<double> ppm;
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw Error(Errc::kParse, "line " + std::to_string(line_no) + ": expected two columns");
    ppm.push_back(parse_double(line.substr(0, comma), line_no));
    values.push_back(parse_double(line.substr(comma + 1), line_no));
  }
  if (ppm.size() < 2) throw Error(Errc::kGridTooSmall, "spectrum CSV needs at least 2 rows");

  const PpmGrid grid(ppm.front(), ppm.back(), ppm.size());
  const double tol = 1e-6 * std::abs(grid.step());
  for (std::size_t c = 0; c < ppm.size(); ++c) {
    if (c > 0 && (ppm[c] - ppm[c - 1]) * grid.step() <= 0.0)
      throw Error(Errc::kParse, "ppm column is not strictly monotone at row " + std::to_string(c + 1));
    if (std::abs(ppm[c] - grid.ppm_at(c)) > tol)
      throw Error(Errc::kParse, "ppm column is not uniformly spaced at row " + std::to_string(c + 1));
  }
  return Spectrum(grid, std::move(values));
}

Spectrum read_spectrum_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  return read_spectrum_csv(in);
}

void write_samples_csv(std::ostream& os, const IndexPartition& part, std::span<const double> intra,
                       std::span<const double> inter) {
  if (intra.size() != part.intra.size() || inter.size() != part.inter.size())
    throw Error(Errc::kLengthMismatch, "sample counts do not match the partition");
  os << "set,i,j,correlation\n";
  for (std::size_t k = 0; k < intra.size(); ++k)
    os << "intra," << part.intra[k].first << ',' << part.intra[k].second << ','
       << format_number(intra[k]) << '\n';
  for (std::size_t k = 0; k < inter.size(); ++k)
    os << "inter," << part.inter[k].first << ',' << part.inter[k].second << ','
       << format_number(inter[k]) << '\n';
}

void write_curve_csv(std::ostream& os, const LearningCurve& curve) {
  os << "epoch,max_bit_error\n";
  for (std::size_t e = 0; e < curve.max_bit_error.size(); ++e)
    os << e + 1 << ',' << format_number(curve.max_bit_error[e]) << '\n';
}

// --- grid & library ----------------------------------------------------------

json to_json(const PpmGrid& grid) {
  return json{{"start_ppm", grid.start_ppm()}, {"end_ppm", grid.end_ppm()}, {"n_channels", grid.size()}};
}

PpmGrid grid_from_json(const json& j) {
  return parsing("grid", [&] {
    return PpmGrid(j.at("start_ppm").get<double>(), j.at("end_ppm").get<double>(),
                   j.at("n_channels").get<std::size_t>());
  });
}

json to_json(const SpectrumLibrary& lib) {
  json entries = json::array();
  for (const auto& e : lib.entries()) {
    const auto v = e.spectrum.values();
    entries.push_back({{"label", e.label}, {"intensities", std::vector<double>(v.begin(), v.end())}});
  }
  return json{{"grid", to_json(lib.grid())}, {"entries", std::move(entries)}};
}

SpectrumLibrary library_from_json(const json& j) {
  return parsing("library", [&] {
    SpectrumLibrary lib(grid_from_json(j.at("grid")));
    for (const auto& e : j.at("entries"))
      lib.add(e.at("label").get<std::string>(),
              Spectrum(lib.grid(), e.at("intensities").get<std::vector<double>>()));
    return lib;
  });
}

SpectrumLibrary read_library(const std::filesystem::path& path) {
  const auto text = read_file(path);
  return library_from_json(parsing("library file", [&] { return json::parse(text); }));
}

// --- model -------------------------------------------------------------------

json to_json(const FitModel& model) {
  json histograms = json::array();
  for (const auto& h : model.histograms) histograms.push_back(h.counts);
  return json{{"format_version", kModelFormatVersion},
              {"grid", to_json(model.grid)},
              {"max_threshold", model.max_threshold},
              {"n_bins", model.n_bins},
              {"suppress_solvent", model.suppress_solvent},
              {"mins", model.envelope.mins},
              {"maxs", model.envelope.maxs},
              {"histograms", std::move(histograms)}};
}

FitModel model_from_json(const json& j) {
  return parsing("model", [&] {
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion)
      throw Error(Errc::kParse, "unsupported model format_version " + std::to_string(version));
    FitModel m{grid_from_json(j.at("grid")),
               j.at("max_threshold").get<double>(),
               j.at("n_bins").get<std::size_t>(),
               j.at("suppress_solvent").get<bool>(),
               {j.at("mins").get<std::vector<double>>(), j.at("maxs").get<std::vector<double>>()},
               {}};
    const std::size_t n = m.grid.size();
    if (m.envelope.mins.size() != n || m.envelope.maxs.size() != n)
      throw Error(Errc::kParse, "envelope length does not match grid");
    if (m.n_bins < 2 || !(m.max_threshold > 0.0))
      throw Error(Errc::kParse, "model needs n_bins >= 2 and a positive threshold");
    const auto& hs = j.at("histograms");
    if (hs.size() != n) throw Error(Errc::kParse, "histogram count does not match grid");
    for (const auto& h : hs) {
      ChannelHistogram hist{h.get<std::vector<std::uint32_t>>(), 0};
      if (hist.counts.size() != m.n_bins) throw Error(Errc::kParse, "histogram has wrong bin count");
      for (auto c : hist.counts) hist.total += c;
      if (!m.histograms.empty() && hist.total != m.histograms.front().total)
        throw Error(Errc::kParse, "histogram totals differ between channels");
      m.histograms.push_back(std::move(hist));
    }
    if (m.histograms.front().total == 0) throw Error(Errc::kParse, "empty histograms");
    return m;
  });
}

// --- reports -----------------------------------------------------------------

json to_json(const DistanceReport& r) {
  return json{{"d_intra", r.d_intra},       {"d_inter", r.d_inter},
              {"d_total", r.d_total},       {"d_avg", r.d_avg},
              {"intra_size", r.intra_size}, {"inter_size", r.inter_size}};
}

DistanceReport distance_report_from_json(const json& j) {
  return parsing("distance report", [&] {
    DistanceReport r;
    r.d_intra = j.at("d_intra").get<double>();
    r.d_inter = j.at("d_inter").get<double>();
    r.d_total = j.at("d_total").get<double>();
    r.d_avg = j.at("d_avg").get<double>();
    r.intra_size = j.at("intra_size").get<std::size_t>();
    r.inter_size = j.at("inter_size").get<std::size_t>();
    return r;
  });
}

json to_json(const BayesReport& r) {
  return json{{"threshold", r.threshold},
              {"error_probability", r.error_probability},
              {"prior_intra", r.prior_intra},
              {"prior_inter", r.prior_inter},
              {"range", {r.range_lo, r.range_hi}},
              {"intra_histogram", histogram_json(r.intra_histogram)},
              {"inter_histogram", histogram_json(r.inter_histogram)}};
}

BayesReport bayes_report_from_json(const json& j) {
  return parsing("bayes report", [&] {
    BayesReport r;
    r.threshold = j.at("threshold").get<double>();
    r.error_probability = j.at("error_probability").get<double>();
    r.prior_intra = j.at("prior_intra").get<double>();
    r.prior_inter = j.at("prior_inter").get<double>();
    const auto range = j.at("range").get<std::vector<double>>();
    if (range.size() != 2) throw Error(Errc::kParse, "range must have two values");
    r.range_lo = range[0];
    r.range_hi = range[1];
    r.intra_histogram = histogram_from_json(j.at("intra_histogram"));
    r.inter_histogram = histogram_from_json(j.at("inter_histogram"));
    return r;
  });
}

// --- network -----------------------------------------------------------------

json to_json(const MlpNetwork& net) {
  const auto h = net.hidden_weights.data();
  const auto o = net.output_weights.data();
  return json{{"format_version", kNetworkFormatVersion},
              {"topology",
               {{"n_inputs", net.topology.n_inputs},
                {"n_hidden", net.topology.n_hidden},
                {"n_outputs", net.topology.n_outputs}}},
              {"seed", net.seed},
              {"hidden_weights", std::vector<double>(h.begin(), h.end())},
              {"output_weights", std::vector<double>(o.begin(), o.end())}};
}

MlpNetwork network_from_json(const json& j) {
  return parsing("network", [&] {
    const int version = j.at("format_version").get<int>();
    if (version != kNetworkFormatVersion)
      throw Error(Errc::kParse, "unsupported network format_version " + std::to_string(version));
    const auto& t = j.at("topology");
    MlpTopology topo{t.at("n_inputs").get<std::size_t>(), t.at("n_hidden").get<std::size_t>(),
                     t.at("n_outputs").get<std::size_t>()};
    if (topo.n_inputs < 1 || topo.n_hidden < 1 || topo.n_outputs < 1)
      throw Error(Errc::kParse, "topology layers must all be >= 1");
    return MlpNetwork{topo,
                      matrix_from_flat(j.at("hidden_weights"), topo.n_hidden, topo.n_inputs + 1,
                                       "hidden_weights"),
                      matrix_from_flat(j.at("output_weights"), topo.n_outputs, topo.n_hidden + 1,
                                       "output_weights"),
                      j.at("seed").get<std::uint64_t>()};
  });
}

// --- generator config --------------------------------------------------------

json to_json(const VariationConfig& v) {
  return json{{"concentration_range", range_json(v.concentration)},
              {"shift_jitter_ppm", v.shift_jitter_ppm},
              {"noise_sigma", v.noise_sigma},
              {"drift_coeff_range", range_json(v.drift_coeff_range)},
              {"drift_degree", v.drift_degree},
              {"solvent_amplitude_factor", v.solvent_amplitude_factor},
              {"solvent_ppm", v.solvent_ppm},
              {"include_solvent", v.include_solvent},
              {"solvent_width_ppm", range_json(v.solvent_width_ppm)},
              {"solvent_amplitude_jitter", range_json(v.solvent_amplitude_jitter)},
              {"peak_cutoff_widths", v.peak_cutoff_widths}};
}

VariationConfig variation_from_json(const json& j, VariationConfig v) {
  return parsing("variation config", [&] {
    if (!j.is_object()) throw Error(Errc::kParse, "variation config must be an object");
    for (const auto& [key, value] : j.items()) {
      if (key == "concentration_range") v.concentration = range_from_json(value);
      else if (key == "shift_jitter_ppm") v.shift_jitter_ppm = value.get<double>();
      else if (key == "noise_sigma") v.noise_sigma = value.get<double>();
      else if (key == "drift_coeff_range") v.drift_coeff_range = range_from_json(value);
      else if (key == "drift_degree") v.drift_degree = value.get<std::size_t>();
      else if (key == "solvent_amplitude_factor") v.solvent_amplitude_factor = value.get<double>();
      else if (key == "solvent_ppm") v.solvent_ppm = value.get<double>();
      else if (key == "include_solvent") v.include_solvent = value.get<bool>();
      else if (key == "solvent_width_ppm") v.solvent_width_ppm = range_from_json(value);
      else if (key == "solvent_amplitude_jitter") v.solvent_amplitude_jitter = range_from_json(value);
      else if (key == "peak_cutoff_widths") v.peak_cutoff_widths = value.get<double>();
      else throw Error(Errc::kParse, "unknown variation key '" + key + "'");
    }
    return v;
  });
}

}  // namespace infospec::io
