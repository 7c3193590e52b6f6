// Prints one PASS/FAIL line per acceptance criterion; exit status 0 iff all pass.

#include <array>
#include <cstdio>
#include <iostream>
#include <string>

#include "chainrep/acceptance.hpp"

namespace {

std::string capture(const std::string& command) {
  std::string out;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  pclose(pipe);
  return out;
}

}  // namespace

int main() {
  using namespace chainrep::acceptance;
  std::cout << std::unitbuf;
  Config config;
  Report report = run(config, [](const Outcome& o, double seconds) {
    char t[32];
    std::snprintf(t, sizeof t, " [%.1fs]", seconds);
    std::cout << status_line(o) << t << "\n";
  });

  // 10: two command-line self-tests with this configuration produce identical
  // reports, identical to the in-process one.
  Outcome ten{10, "deterministic reports", true, 0, ""};
  const std::string command = std::string(CHAINREP_CLI) + " selftest --format json --seed " + std::to_string(config.seed);
  const std::string expected = report.to_json().dump(2) + "\n";
  for (int i = 0; i < 2; ++i) {
    ++ten.checks;
    if (capture(command) != expected) {
      ten.pass = false;
      ten.detail = "run " + std::to_string(i + 1) + " differs from the in-process report";
      break;
    }
  }
  if (ten.pass) ten.detail = "two command-line runs byte-identical to the in-process report";
  std::cout << status_line(ten) << "\n";
  bool ok = report.pass() && ten.pass;
  std::cout << (ok ? "ALL PASS" : "SOME FAILED") << "\n";
  return ok ? 0 : 1;
}
