// Config ingestion (JSON) and report emission (CSV + manifest JSON).
#pragma once

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "lvrlab/error.hpp"
#include "lvrlab/experiments.hpp"

namespace lvrlab {

inline constexpr std::string_view tool_version = "0.3.0";

using json = nlohmann::json;

// -----------------------------------------------------------------------------
// Config
// -----------------------------------------------------------------------------

namespace detail {

inline double number_field(const json& j, const std::string& key) {
  if (!j.is_number()) {
    throw config_error(key, "expected a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    throw config_error(key, "must be finite");
  }
  return v;
}

inline long long integer_field(const json& j, const std::string& key) {
  if (!j.is_number_integer()) {
    throw config_error(key, "expected an integer");
  }
  return j.get<long long>();
}

inline int int_field(const json& j, const std::string& key) {
  const long long v = integer_field(j, key);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw config_error(key, "out of range");
  }
  return static_cast<int>(v);
}

}  // namespace detail

inline RetentionMode parse_mode(const std::string& s) {
  if (s == to_string(RetentionMode::ConversionAtPoolPrice)) {
    return RetentionMode::ConversionAtPoolPrice;
  }
  if (s == to_string(RetentionMode::PerBlockReAdd)) {
    return RetentionMode::PerBlockReAdd;
  }
  throw config_error("mode", "expected \"conversion_at_pool_price\" or \"per_block_readd\"");
}

// Fields absent from `doc` keep their value from `base`.
inline ExperimentConfig parse_config_json(const json& doc, ExperimentConfig base = {}) {
  if (!doc.is_object()) {
    throw config_error("<root>", "config must be a JSON object");
  }
  ExperimentConfig c = std::move(base);
  for (const auto& [key, value] : doc.items()) {
    if (key == "sigma_daily") {
      c.gbm.sigma_daily = detail::number_field(value, key);
    } else if (key == "mu_daily") {
      c.gbm.mu_daily = detail::number_field(value, key);
    } else if (key == "blocks_per_day") {
      c.gbm.blocks_per_day = detail::int_field(value, key);
    } else if (key == "initial_price") {
      c.initial_price = detail::number_field(value, key);
    } else if (key == "initial_reserve_a") {
      c.initial_reserve_a = detail::number_field(value, key);
    } else if (key == "initial_reserve_b") {
      c.initial_reserve_b = detail::number_field(value, key);
    } else if (key == "fee") {
      c.fee = detail::number_field(value, key);
    } else if (key == "days") {
      c.days = detail::int_field(value, key);
    } else if (key == "n_paths") {
      c.n_paths = detail::int_field(value, key);
    } else if (key == "seed") {
      if (!value.is_number_integer() || (value.is_number_integer() && !value.is_number_unsigned() &&
                                         value.get<long long>() < 0)) {
        throw config_error(key, "expected a non-negative integer");
      }
      c.seed = value.get<std::uint64_t>();
    } else if (key == "rebate_beta1") {
      c.rebate_beta1 = detail::number_field(value, key);
    } else if (key == "rebate_z") {
      c.rebate_z = detail::int_field(value, key);
    } else if (key == "readd_pct") {
      c.readd_pct = detail::number_field(value, key);
    } else if (key == "readd_min_a") {
      c.readd_min_a = detail::number_field(value, key);
    } else if (key == "readd_min_b") {
      c.readd_min_b = detail::number_field(value, key);
    } else if (key == "mode") {
      if (!value.is_string()) {
        throw config_error(key, "expected a string");
      }
      c.mode = parse_mode(value.get<std::string>());
    } else {
      throw config_error(key, "unknown configuration key");
    }
  }
  c.validate();
  return c;
}

inline ExperimentConfig parse_config(const std::filesystem::path& path, ExperimentConfig base = {}) {
  std::ifstream in(path);
  if (!in) {
    throw config_error("config", "cannot open " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error("config", std::string("malformed JSON: ") + e.what());
  }
  return parse_config_json(doc, std::move(base));
}

inline json config_to_json(const ExperimentConfig& c) {
  return json{
      {"sigma_daily", c.gbm.sigma_daily},
      {"mu_daily", c.gbm.mu_daily},
      {"blocks_per_day", c.gbm.blocks_per_day},
      {"initial_price", c.initial_price},
      {"initial_reserve_a", c.initial_reserve_a},
      {"initial_reserve_b", c.initial_reserve_b},
      {"fee", c.fee},
      {"days", c.days},
      {"n_paths", c.n_paths},
      {"seed", c.seed},
      {"rebate_beta1", c.rebate_beta1},
      {"rebate_z", c.rebate_z},
      {"readd_pct", c.readd_pct},
      {"readd_min_a", c.readd_min_a},
      {"readd_min_b", c.readd_min_b},
      {"mode", std::string(to_string(c.mode))},
  };
}

// -----------------------------------------------------------------------------
// CSV
// -----------------------------------------------------------------------------

// 17 significant digits round-trips any double.
inline std::string format_double(double v) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

inline constexpr std::string_view retention_csv_header =
    "path_id,value_protected,value_unprotected,value_hodl,ratio_protected_unprotected,ratio_hodl_unprotected";

inline std::string retention_csv(const ExperimentReport& report) {
  std::string out(retention_csv_header);
  out += '\n';
  for (const auto& r : report.per_path) {
    out += std::to_string(r.path_id);
    for (double v : {r.value_protected, r.value_unprotected, r.value_hodl, r.ratio_protected_unprotected,
                     r.ratio_hodl_unprotected}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

inline std::string readd_sweep_csv(const std::vector<ReAddRow>& rows) {
  std::string out = "pct,mean_ratio,std_error,mean_ratio_hodl\n";
  for (const auto& r : rows) {
    out += format_double(r.pct) + ',' + format_double(r.mean_ratio) + ',' + format_double(r.std_error) + ',' +
           format_double(r.mean_ratio_hodl) + '\n';
  }
  return out;
}

inline std::string blocktime_sweep_csv(const BlocktimeSweep& sweep) {
  std::string out = "block_gap,block_time,arb_profit_per_day,std_error,fitted_slope,slope_std_error\n";
  for (const auto& r : sweep.rows) {
    out += std::to_string(r.block_gap) + ',' + format_double(r.block_time_days) + ',' +
           format_double(r.arb_profit_per_day) + ',' + format_double(r.std_error) + ',' +
           format_double(sweep.fitted_slope) + ',' + format_double(sweep.slope_std_error) + '\n';
  }
  return out;
}

inline std::string delay_sweep_csv(const std::vector<DelayRow>& rows) {
  std::string out = "delta_blocks,intrinsic,time_ev,total,std_error\n";
  for (const auto& r : rows) {
    out += std::to_string(r.delta_blocks) + ',' + format_double(r.intrinsic) + ',' + format_double(r.time_ev) + ',' +
           format_double(r.total) + ',' + format_double(r.std_error) + '\n';
  }
  return out;
}

inline std::string time_value_csv(const std::vector<EvDecomposition>& rows) {
  std::string out = "horizon_blocks,intrinsic,time_value,total,std_error,n_samples\n";
  for (const auto& r : rows) {
    out += std::to_string(r.horizon) + ',' + format_double(r.intrinsic) + ',' + format_double(r.time_value) + ',' +
           format_double(r.total) + ',' + format_double(r.std_error) + ',' + std::to_string(r.n_samples) + '\n';
  }
  return out;
}

// -----------------------------------------------------------------------------
// Files and manifest
// -----------------------------------------------------------------------------

inline std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::filesystem::filesystem_error("cannot read", path, std::make_error_code(std::errc::io_error));
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) {
    throw std::filesystem::filesystem_error("cannot write", path, std::make_error_code(std::errc::io_error));
  }
}

inline std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

struct OutputFile {
  std::string path;  // relative to the output directory
  std::string sha256;
};

struct RunManifest {
  std::string tool_version{lvrlab::tool_version};
  std::string command;
  json config_echo;
  std::uint64_t seed = 0;
  std::string started_at;
  std::string finished_at;
  std::vector<OutputFile> output_files;
  json extra = json::object();
};

inline json manifest_to_json(const RunManifest& m) {
  json files = json::array();
  for (const auto& f : m.output_files) {
    files.push_back({{"path", f.path}, {"sha256", f.sha256}});
  }
  return json{{"tool_version", m.tool_version}, {"command", m.command},       {"config_echo", m.config_echo},
              {"seed", m.seed},                 {"started_at", m.started_at}, {"finished_at", m.finished_at},
              {"output_files", files},          {"extra", m.extra}};
}

// Writes `content` to out_dir/name and records its digest in the manifest.
inline void emit_file(const std::filesystem::path& out_dir, const std::string& name, std::string_view content,
                      RunManifest& manifest) {
  std::filesystem::create_directories(out_dir);
  write_file(out_dir / name, content);
  manifest.output_files.push_back({name, sha256_hex(content)});
}

inline void write_manifest(const std::filesystem::path& out_dir, const RunManifest& manifest) {
  std::filesystem::create_directories(out_dir);
  write_file(out_dir / "manifest.json", manifest_to_json(manifest).dump(2) + "\n");
}

// retention.csv + manifest.json; returns the paths written.
inline std::vector<std::filesystem::path> emit_report(const ExperimentReport& report,
                                                      const std::filesystem::path& out_dir,
                                                      RunManifest manifest = {}) {
  if (manifest.command.empty()) {
    manifest.command = "retention";
  }
  manifest.config_echo = config_to_json(report.config_echo);
  manifest.seed = report.config_echo.seed;
  emit_file(out_dir, "retention.csv", retention_csv(report), manifest);
  write_manifest(out_dir, manifest);
  return {out_dir / "retention.csv", out_dir / "manifest.json"};
}

}  // namespace lvrlab
