#include "twinaudit/harness/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace twinaudit::harness {

namespace fs = std::filesystem;
using nlohmann::json;

BenchSummary Summarize(const std::vector<double>& samples) {
  if (samples.empty()) throw InvalidArgumentError("cannot summarize an empty sample");
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  BenchSummary s;
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2.0;
  s.min = sorted.front();
  s.max = sorted.back();
  double sq = 0;
  for (double x : sorted) sq += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(sq / n);
  s.coefficient_of_variation = s.mean > 0 ? s.stddev / s.mean : 0.0;
  return s;
}

std::vector<std::pair<double, double>> CdfPoints(const std::vector<BenchIteration>& iterations) {
  std::vector<double> lat;
  for (const auto& it : iterations) lat.push_back(it.latency_seconds);
  std::sort(lat.begin(), lat.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    out.emplace_back(lat[i], static_cast<double>(i + 1) / static_cast<double>(lat.size()));
  }
  return out;
}

json BenchResult::SummaryJson() const {
  return {{"fixture", fixture},
          {"iterations", iterations.size()},
          {"failed", failed.size()},
          {"mean", summary.mean},
          {"median", summary.median},
          {"min", summary.min},
          {"max", summary.max},
          {"stddev", summary.stddev},
          {"coefficient_of_variation", summary.coefficient_of_variation},
          {"payload_bytes", payload_bytes},
          {"footprint_bytes", footprint_bytes},
          {"warnings", warnings}};
}

BenchResult RunDeployBench(const DeployBenchHooks& hooks, const DeployBenchOptions& options) {
  if (!hooks.create || !hooks.destroy) throw InvalidArgumentError("bench hooks need create and destroy");
  if (options.iterations == 0) throw InvalidArgumentError("iterations must be positive");
  BenchResult result;
  const auto allowed = static_cast<std::size_t>(
      std::floor(options.max_failure_ratio * static_cast<double>(options.iterations)));

  // The first warm-up instance also provides the footprint.
  const std::size_t warmups = std::max<std::size_t>(options.warmup, hooks.footprint ? 1 : 0);
  for (std::size_t w = 0; w < warmups; ++w) {
    try {
      const std::string id = hooks.create();
      if (w == 0 && hooks.footprint) result.footprint_bytes = hooks.footprint(id);
      hooks.destroy(id);
    } catch (const std::exception& e) {
      result.warnings.push_back(std::string("warm-up failed: ") + e.what());
    }
  }

  using Clock = std::chrono::steady_clock;
  for (std::size_t i = 1; i <= options.iterations; ++i) {
    std::string id;
    const auto start = Clock::now();
    try {
      id = hooks.create();
    } catch (const std::exception& e) {
      result.failed.push_back(i);
      result.warnings.push_back("iteration " + std::to_string(i) + " excluded: " + e.what());
      if (result.failed.size() > allowed) {
        throw BenchAborted(std::to_string(result.failed.size()) + " of " +
                           std::to_string(options.iterations) +
                           " iterations failed; last error: " + e.what());
      }
      continue;
    }
    const std::chrono::duration<double> elapsed = Clock::now() - start;
    result.iterations.push_back({i, elapsed.count()});
    try {
      hooks.destroy(id);
    } catch (const std::exception& e) {
      result.warnings.push_back("iteration " + std::to_string(i) + " destroy failed: " + e.what());
    }
  }
  std::vector<double> lat;
  for (const auto& it : result.iterations) lat.push_back(it.latency_seconds);
  result.summary = Summarize(lat);
  return result;
}

DeployBenchHooks ClientHooks(sdt::SdtManagerClient& client, json create_body) {
  auto body = std::make_shared<const json>(std::move(create_body));
  DeployBenchHooks hooks;
  hooks.create = [&client, body] {
    const json resp = client.Create(*body);
    if (resp.value("state", "") != "READY") {
      throw Error("not_ready", "instance " + resp.value("sdtId", "?") + " is " + resp.value("state", "?"));
    }
    return resp.at("sdtId").get<std::string>();
  };
  hooks.destroy = [&client](const std::string& id) { client.Destroy(id); };
  hooks.footprint = [&client](const std::string& id) {
    return client.Footprint(id).at("footprintBytes").get<std::size_t>();
  };
  return hooks;
}

namespace {

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path Sibling(const fs::path& out, const std::string& suffix) {
  fs::path stem = out;
  if (stem.extension() == ".csv") stem.replace_extension();
  return fs::path(stem.string() + suffix);
}

void Write(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::trunc);
  f << text;
  if (!f) throw IoError("cannot write " + path.string());
}

}  // namespace

std::vector<fs::path> WriteBenchOutputs(const BenchResult& result, const fs::path& out) {
  std::string csv = "iteration,latency_seconds\n";
  for (const auto& it : result.iterations) {
    csv += std::to_string(it.index) + "," + Num(it.latency_seconds) + "\n";
  }
  std::string cdf = "latency_seconds,cumulative_fraction\n";
  for (const auto& [lat, frac] : CdfPoints(result.iterations)) cdf += Num(lat) + "," + Num(frac) + "\n";
  const fs::path cdf_path = Sibling(out, ".cdf.csv");
  const fs::path summary_path = Sibling(out, ".summary.json");
  Write(out, csv);
  Write(cdf_path, cdf);
  Write(summary_path, result.SummaryJson().dump(2) + "\n");
  return {out, cdf_path, summary_path};
}

std::vector<BenchIteration> ReadLatencyCsv(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read " + path.string());
  std::string line;
  std::getline(f, line);
  if (line != "iteration,latency_seconds") throw InvalidArgumentError("unexpected CSV header: " + line);
  std::vector<BenchIteration> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidArgumentError("malformed CSV row: " + line);
    out.push_back({std::stoul(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
  }
  return out;
}

}  // namespace twinaudit::harness
