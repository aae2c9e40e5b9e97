#include "bbmx/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bbmx/extremal.hpp"
#include "bbmx/martingales.hpp"
#include "bbmx/parallel.hpp"
#include "bbmx/stats.hpp"

namespace bbmx {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

BbmConfig RunConfig::bbm_config() const {
  BbmConfig config;
  config.horizon = horizon;
  config.offspring = OffspringDistribution(offspring);
  config.checkpoints = checkpoints;
  config.cutoff = cutoff;
  config.prune = prune;
  config.limits.max_population = max_population;
  return config;
}

ordered_json RunConfig::canonical_json() const {
  ordered_json j;
  j["horizon"] = horizon;
  ordered_json law = ordered_json::object();
  for (const auto& [k, p] : offspring) law[std::to_string(k)] = p;
  j["offspring"] = law;
  j["checkpoints"] = checkpoints;
  j["cutoff"] = cutoff;
  if (prune) {
    j["prune"] = {{"L", prune->offset}, {"alpha", prune->alpha}};
  } else {
    j["prune"] = nullptr;
  }
  j["replicas"] = replicas;
  j["seed"] = seed;
  if (thin_q) {
    j["thin_q"] = *thin_q;
  } else {
    j["thin_q"] = nullptr;
  }
  j["max_population"] = max_population;
  return j;
}

RunConfig parse_run_config(const json& j) {
  RunConfig config;
  const auto need_number = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
      throw std::invalid_argument(std::string("config: field '") + key +
                                  "' missing or not a number");
    }
    return j.at(key).get<double>();
  };
  if (j.contains("horizon")) config.horizon = need_number("horizon");
  if (!(config.horizon > 0.0)) {
    throw std::invalid_argument("config: 'horizon' must be > 0");
  }
  if (j.contains("offspring")) {
    const auto& law = j.at("offspring");
    if (!law.is_object() || law.empty()) {
      throw std::invalid_argument(
          "config: 'offspring' must be an object {k: p_k}");
    }
    config.offspring.clear();
    for (const auto& [key, value] : law.items()) {
      std::size_t pos = 0;
      unsigned long k = 0;
      try {
        k = std::stoul(key, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != key.size() || k == 0) {
        throw std::invalid_argument("config: offspring key '" + key +
                                    "' is not a positive integer");
      }
      if (!value.is_number()) {
        throw std::invalid_argument("config: offspring p_" + key +
                                    " is not a number");
      }
      config.offspring.emplace_back(static_cast<std::uint32_t>(k),
                                    value.get<double>());
    }
  }
  OffspringDistribution validated(config.offspring);  // throws with details
  if (j.contains("checkpoints")) {
    if (!j.at("checkpoints").is_array()) {
      throw std::invalid_argument("config: 'checkpoints' must be an array");
    }
    config.checkpoints = j.at("checkpoints").get<std::vector<double>>();
  }
  if (j.contains("cutoff")) config.cutoff = need_number("cutoff");
  if (j.contains("prune") && !j.at("prune").is_null()) {
    const auto& p = j.at("prune");
    PruneBarrier barrier;
    if (p.contains("L")) barrier.offset = p.at("L").get<double>();
    if (p.contains("alpha")) barrier.alpha = p.at("alpha").get<double>();
    config.prune = barrier;
  }
  const auto need_uint = [&](const char* key) {
    const auto& value = j.at(key);
    if (!value.is_number_integer() ||
        (!value.is_number_unsigned() && value.get<std::int64_t>() < 0)) {
      throw std::invalid_argument(std::string("config: '") + key +
                                  "' must be a non-negative integer");
    }
    return value.get<std::uint64_t>();
  };
  if (j.contains("replicas")) config.replicas = need_uint("replicas");
  if (j.contains("seed")) config.seed = need_uint("seed");
  if (j.contains("thin_q") && !j.at("thin_q").is_null()) {
    config.thin_q = j.at("thin_q").get<double>();
    if (!(*config.thin_q > 0.0) || !(*config.thin_q < 1.0)) {
      throw std::invalid_argument("config: 'thin_q' must lie in (0, 1)");
    }
  }
  if (j.contains("workers")) config.workers = j.at("workers").get<int>();
  if (j.contains("max_population")) {
    config.max_population = j.at("max_population").get<std::uint64_t>();
  }
  config.bbm_config().validate();
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& err) {
    throw std::invalid_argument("config: " + path.string() +
                                " is not valid JSON: " + err.what());
  }
  return parse_run_config(j);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

RunOutcome run_experiment(const RunConfig& config,
                          const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const BbmConfig bbm = config.bbm_config();

  std::vector<std::string> records(config.replicas);
  std::vector<double> max_values, mckean_values, derivative_values,
      population_values;
  max_values.reserve(config.replicas);
  std::string status = "ok";
  std::string abort_detail;

  try {
    parallel_for(config.replicas, config.workers, [&](std::size_t i) {
      const BbmSnapshot snap =
          simulate(bbm, StreamKey{config.seed, static_cast<std::uint64_t>(i)});
      ordered_json rec;
      rec["schema"] = kSchemaVersion;
      rec["replica"] = i;
      rec["t"] = snap.horizon;
      rec["n"] = snap.particle_count();
      if (snap.pruned) {
        rec["pruned"] = true;
        rec["empty_after_prune"] = snap.empty_after_prune;
      }
      if (!snap.leaves.empty()) {
        rec["max_centered"] = max_centered(snap);
        if (!snap.pruned) {
          rec["Z"] = derivative_martingale(snap);
          rec["Y"] = mckean_martingale(snap);
        }
        const ExtendedPointSample sample = extract(snap, bbm.cutoff);
        json atoms = json::array();
        for (const auto& atom : sample.atoms) {
          atoms.push_back({atom.embedding, atom.value});
        }
        rec["atoms"] = std::move(atoms);
        if (config.thin_q) {
          const ClusterDecomposition clusters =
              thin_by_overlap(sample, *config.thin_q);
          ordered_json thin;
          thin["q"] = *config.thin_q;
          thin["representatives"] = clusters.representatives;
          thin["assignment"] = clusters.assignment;
          thin["offsets"] = clusters.relative_offsets;
          rec["clusters"] = std::move(thin);
        }
      }
      records[i] = rec.dump();
    });
  } catch (const ResourceLimitError& err) {
    status = "aborted:resource-cap";
    abort_detail = err.what();
  }

  std::uint64_t written = 0;
  std::string body;
  if (status == "ok") {
    for (std::size_t i = 0; i < records.size(); ++i) {
      body += records[i];
      body += '\n';
      ++written;
      const json rec = json::parse(records[i]);
      population_values.push_back(rec.at("n").get<double>());
      if (rec.contains("max_centered")) {
        max_values.push_back(rec.at("max_centered").get<double>());
      }
      if (rec.contains("Z")) {
        derivative_values.push_back(rec.at("Z").get<double>());
        mckean_values.push_back(rec.at("Y").get<double>());
      }
    }
  }

  const auto records_path = out_dir / "replicas.jsonl";
  write_text(records_path, body);

  ordered_json summary;
  summary["schema"] = kSchemaVersion;
  summary["replicas"] = written;
  if (!population_values.empty()) {
    summary["n_mean"] = mean(population_values);
    if (!max_values.empty()) {
      summary["max_centered_quantiles"] = {
          {"p25", quantile(max_values, 0.25)},
          {"p50", quantile(max_values, 0.50)},
          {"p75", quantile(max_values, 0.75)}};
    }
    if (!mckean_values.empty()) {
      summary["Y_mean"] = mean(mckean_values);
      summary["Z_median_of_means"] =
          derivative_values.size() >= 16
              ? median_of_means(derivative_values, 16)
              : mean(derivative_values);
    }
  }
  const auto summary_path = out_dir / "summary.json";
  const std::string summary_text = summary.dump(2) + "\n";
  write_text(summary_path, summary_text);

  const std::string config_text = config.canonical_json().dump();
  ordered_json manifest;
  manifest["schema"] = kSchemaVersion;
  manifest["tool_version"] = kToolVersion;
  manifest["config"] = config.canonical_json();
  manifest["config_fnv64"] = hex64(fnv1a64(config_text));
  manifest["seed"] = config.seed;
  manifest["replicas"] = config.replicas;
  manifest["created_utc"] = timestamp_utc();
  manifest["status"] = status;
  if (!abort_detail.empty()) manifest["abort_detail"] = abort_detail;
  manifest["outputs"] = json::array(
      {{{"path", "replicas.jsonl"},
        {"fnv64", hex64(fnv1a64(body))},
        {"bytes", body.size()}},
       {{"path", "summary.json"},
        {"fnv64", hex64(fnv1a64(summary_text))},
        {"bytes", summary_text.size()}}});
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");

  return RunOutcome{out_dir, status, written};
}

ordered_json summarize_run(const std::filesystem::path& run_dir) {
  const auto manifest_path = run_dir / "manifest.json";
  const json manifest = json::parse(read_text(manifest_path));
  std::istringstream lines(read_text(run_dir / "replicas.jsonl"));
  std::string line;
  std::vector<double> n_values, max_values, mckean_values, derivative_values;
  std::uint64_t count = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const json rec = json::parse(line);
    ++count;
    n_values.push_back(rec.at("n").get<double>());
    if (rec.contains("max_centered")) {
      max_values.push_back(rec.at("max_centered").get<double>());
    }
    if (rec.contains("Z")) {
      derivative_values.push_back(rec.at("Z").get<double>());
      mckean_values.push_back(rec.at("Y").get<double>());
    }
  }
  ordered_json out;
  out["schema"] = kSchemaVersion;
  out["run"] = run_dir.string();
  out["status"] = manifest.value("status", "unknown");
  out["replicas"] = count;
  if (!n_values.empty()) out["n_mean"] = mean(n_values);
  if (!max_values.empty()) {
    out["max_centered_quantiles"] = {{"p25", quantile(max_values, 0.25)},
                                     {"p50", quantile(max_values, 0.50)},
                                     {"p75", quantile(max_values, 0.75)}};
  }
  if (!mckean_values.empty()) {
    out["Y_mean"] = mean(mckean_values);
    out["Z_median_of_means"] = derivative_values.size() >= 16
                                   ? median_of_means(derivative_values, 16)
                                   : mean(derivative_values);
  }
  return out;
}

}  // namespace bbmx
