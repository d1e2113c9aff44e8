// One line per acceptance criterion: "[PASS|FAIL] <id> <title> | worst <check> err=... tol=...".
// With an argument, runs that criterion only and exits 0 iff it passes.

#include <cstdio>
#include <cstdlib>
#include <algorithm>
#include <unistd.h>
#include <filesystem>
#include <string>

#include "cli.hpp"
#include "suite.hpp"

namespace {

using namespace tfweyl;

void print_check(const char* label, const suite::Check& k) {
  std::printf("    %s %s: err=%.3e tol=%.1e lhs=%.6g rhs=%.6g%s%s\n", k.pass ? "ok  " : "FAIL", label, k.error,
              k.tolerance, k.lhs, k.rhs, k.note.empty() ? "" : " ", k.note.c_str());
}

// Two CLI runs with one config must write byte-identical files.
suite::Check cli_rerun_check() {
  const auto root = std::filesystem::temp_directory_path() / ("tfweyl_accept_" + std::to_string(::getpid()));
  std::string hashes[2];
  bool ok = true;
  for (int k = 0; k < 2; ++k) {
    cli::RunConfig cfg;
    cfg.command = cli::Command::diagnose;
    cfg.symbol = Fixture::chirp_symbol(-1, Fixture::gaussian());
    cfg.out = (root / std::to_string(k)).string();
    cli::run(cfg);
    cfg.command = cli::Command::op;
    cfg.symbol = Fixture::tensor(Fixture::gaussian(), Fixture::hermite(1));
    cli::run(cfg);
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(cfg.out))
      if (e.is_regular_file()) files.push_back(std::filesystem::relative(e.path(), cfg.out));
    std::sort(files.begin(), files.end());
    std::string all;
    for (const auto& f : files) all += f.string() + ":" + io::sha256_file(std::filesystem::path(cfg.out) / f) + "\n";
    hashes[k] = all;
    ok = ok && !files.empty();
  }
  std::filesystem::remove_all(root);
  const bool same = ok && hashes[0] == hashes[1];
  return {"CLI rerun artifact bytes", static_cast<double>(hashes[0].size()), static_cast<double>(hashes[1].size()),
          same ? 0.0 : 1.0, 0.0, same, io::sha256_hex(hashes[0]).substr(0, 16)};
}

bool report(const suite::Suite& s, int id) {
  auto c = s.run(id);
  if (id == 14) c.checks.push_back(cli_rerun_check());
  const suite::Check* worst = &c.checks.front();
  for (const auto& k : c.checks)
    if ((k.tolerance > 0 ? k.error / k.tolerance : k.error) > (worst->tolerance > 0 ? worst->error / worst->tolerance : worst->error))
      worst = &k;
  std::printf("[%s] criterion %2d %s | worst: %s err=%.3e tol=%.1e\n", c.pass() ? "PASS" : "FAIL", id,
              c.title.c_str(), worst->name.c_str(), worst->error, worst->tolerance);
  for (const auto& k : c.checks)
    if (!k.pass) print_check("literal", k);
  for (const auto& k : c.corrected) print_check("corrected", k);
  std::fflush(stdout);
  return c.pass();
}

}  // namespace

int main(int argc, char** argv) {
  const suite::Suite s;
  if (argc > 1) {
    const int id = std::atoi(argv[1]);
    if (id < 1 || id > suite::kCriteria) {
      std::fprintf(stderr, "usage: tfweyl_acceptance [1-%d]\n", suite::kCriteria);
      return 2;
    }
    return report(s, id) ? 0 : 1;
  }
  int failed = 0;
  for (int id = 1; id <= suite::kCriteria; ++id) failed += report(s, id) ? 0 : 1;
  return failed == 0 ? 0 : 1;
}
