#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mockplectic {

struct RunConfig {
  std::string command;
  std::string curve;      // "a1,a2,a3,a4,a6"
  long p = 0;
  int depth = 4;
  int level = 1;
  int prec = 20;
  int threads = 1;
  std::string out;
  std::string form;       // "A,B,C" for sh-point
  long disc = 0;          // cm-invariant; 0 picks the first class-number-one D with p inert
  long recognize = 0;     // sh-point height bound; 0 skips recognition
};

struct CliError : std::runtime_error {
  std::string code;
  CliError(std::string c, const std::string& what) : std::runtime_error(what), code(std::move(c)) {}
};

std::vector<long> parse_integers(const std::string& text, size_t count, const std::string& code);

/// Runs the subcommand and fills `json`. Returns 0 on success, 1 when a check fails,
/// 2 on invalid input and 3 on a runtime error; the last two produce an error document.
int run(const RunConfig& config, std::string& json);

}  // namespace mockplectic
