#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "twinaudit/errors.hpp"
#include "twinaudit/sdt/manager.hpp"

namespace twinaudit::harness {

struct BenchIteration {
  std::size_t index = 0;  // 1-based
  double latency_seconds = 0;
};

struct BenchSummary {
  double mean = 0;
  double median = 0;
  double min = 0;
  double max = 0;
  double stddev = 0;  // population
  double coefficient_of_variation = 0;
};

struct BenchResult {
  std::string fixture;
  std::vector<BenchIteration> iterations;  // successful iterations only
  std::vector<std::size_t> failed;         // indices of excluded iterations
  std::vector<std::string> warnings;
  BenchSummary summary;
  std::size_t payload_bytes = 0;    // one serialized create request
  std::size_t footprint_bytes = 0;  // stored representation of one instance

  std::size_t attempted() const { return iterations.size() + failed.size(); }
  nlohmann::json SummaryJson() const;
};

// Throws InvalidArgumentError on an empty sample.
BenchSummary Summarize(const std::vector<double>& samples);

// Latencies sorted ascending with cumulative fraction i/n.
std::vector<std::pair<double, double>> CdfPoints(const std::vector<BenchIteration>& iterations);

class BenchAborted : public Error {
 public:
  explicit BenchAborted(const std::string& message) : Error("bench_aborted", message) {}
};

struct DeployBenchHooks {
  // Sends one create and returns the READY sdt id; throws on failure.
  std::function<std::string()> create;
  std::function<void(const std::string&)> destroy;
  // Footprint of a READY instance.
  std::function<std::size_t(const std::string&)> footprint;
};

struct DeployBenchOptions {
  std::size_t iterations = 50;
  std::size_t warmup = 3;  // untimed cycles before the first timed one
  double max_failure_ratio = 0.10;
};

// Sequential create/destroy cycles, each create timed from send to response.
// Failed iterations are excluded with a warning; more than the allowed
// fraction throws BenchAborted.
BenchResult RunDeployBench(const DeployBenchHooks& hooks, const DeployBenchOptions& options);

// Hooks that post a pre-built create body through a manager client.
DeployBenchHooks ClientHooks(sdt::SdtManagerClient& client, nlohmann::json create_body);

// `<out>` gets iteration,latency_seconds rows; `<stem>.cdf.csv` the sorted
// CDF; `<stem>.summary.json` the summary. Returns the written paths.
std::vector<std::filesystem::path> WriteBenchOutputs(const BenchResult& result,
                                                     const std::filesystem::path& out);

// Reads an iteration,latency_seconds CSV back.
std::vector<BenchIteration> ReadLatencyCsv(const std::filesystem::path& path);

}  // namespace twinaudit::harness
