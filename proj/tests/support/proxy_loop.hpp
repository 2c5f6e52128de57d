#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "jscov/coverage_store.hpp"
#include "jscov/proxy.hpp"

namespace jscov::testing {

// Drives the fixture site through a real origin server, the proxy over
// sockets and a scripted client that plays the browser's part: it reads the
// coverage key and markers out of each instrumented script, picks the ids of
// the functions the fixture manifest says run, and posts beacons.
struct LoopOptions {
  std::filesystem::path workdir;  // store file and cache directory go here
  int cycles = 5;
  PhasePolicy phase;
};

struct LoopScript {
  std::string url;
  std::string encoding;                      // as served by the origin
  std::size_t original_bytes = 0;            // decoded
  std::vector<std::string> variants_seen;    // X-Jscov-Variant per cycle
  std::string final_variant;                 // after the last cycle
  std::size_t final_bytes = 0;               // decoded
  std::size_t replaced_units = 0;            // stubs in the final body
  bool final_parses = false;
  std::size_t sidecars_fetched = 0;
  bool sidecars_ok = true;                   // 200, javascript, parse
  int origin_fetches = 0;
  std::size_t executed_reported = 0;         // ids in the stored record
};

struct LoopResult {
  std::vector<LoopScript> scripts;
  int page_origin_fetches = 0;
  int beacons_accepted = 0;
  int beacons_rejected = 0;
  double seconds = 0;
  // Anything the client found unexpected, in plain words.
  std::vector<std::string> problems;
  // After a restart on the same store and cache: variants and origin fetches.
  std::map<std::string, std::string> restart_variants;
  int restart_origin_fetches = 0;
};

LoopResult run_proxy_loop(const LoopOptions& options);

}  // namespace jscov::testing
