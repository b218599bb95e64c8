#include "mockplectic/checks.hpp"
#include "mockplectic/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>

using namespace mockplectic;

namespace {

constexpr int kThreads = 8;

CheckResult determinism() {
  auto t0 = std::chrono::steady_clock::now();
  CheckResult r{"byte-identical JSON, 1 vs 8 threads", true, "", 0};
  std::vector<RunConfig> configs;
  auto add = [&](const std::string& cmd, auto&& edit) {
    RunConfig c;
    c.command = cmd;
    c.curve = "0,-1,1,-10,-20";
    c.p = 11;
    edit(c);
    configs.push_back(c);
  };
  add("lp", [](RunConfig& c) { c.depth = 3; });
  add("tate-q", [](RunConfig& c) { c.prec = 20; });
  add("mtt", [](RunConfig& c) { c.depth = 3; });
  add("sh-point", [](RunConfig& c) {
    c.form = "1,0,-2";
    c.depth = 3;
    c.recognize = 100;
  });
  add("cm-invariant", [](RunConfig& c) {
    c.disc = -67;
    c.level = 2;
  });
  add("check", [](RunConfig&) {});
  for (auto c : configs) {
    std::string a, b;
    c.threads = 1;
    int sa = run(c, a);
    c.threads = kThreads;
    int sb = run(c, b);
    bool same = sa == sb && a == b && sa == 0;
    if (!same) r.pass = false;
    r.detail += c.command + (same ? " ok; " : " DIFFERS; ");
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  auto wanted = [&](int k) { return only.empty() || only.count(k); };

  auto E = CurveData::make({0, -1, 1, -10, -20}, 11);
  auto S = make_symbol(E);
  auto rm = RMPoint::make(1, 0, -2, 11, 20);
  std::optional<CMContext> ctx;
  std::optional<CMPoint> cm;
  auto cm_ready = [&] {
    if (!ctx) {
      ctx = CMContext::make(E, kThreads);
      cm = CMPoint::principal(-67, 11);
    }
  };

  std::vector<std::pair<int, std::function<CheckResult()>>> criteria{
      {1, [&] { return check_modsym(E, S); }},
      {2, [&] { return check_harmonicity(S); }},
      {3, [&] { return check_interpolation(E, S); }},
      {4, [&] { return check_tate(E); }},
      {5, [&] { return check_mtt(E, S, {2, 3, 4}, kThreads); }},
      {6, [&] { return check_riemann(S, 2, 5, kThreads); }},
      {7, [&] { return check_sh_consistency(E, S, rm, 5, kThreads); }},
      {8, [&] { return check_sh_recognition(E, S, rm, 7, {100, 1000, 10000}, kThreads).result; }},
      {9,
       [&] {
         cm_ready();
         return check_cm_harmonicity(*ctx, *cm);
       }},
      {10,
       [&] {
         cm_ready();
         return check_trace(*ctx, *cm, 1);
       }},
      {11,
       [&] {
         cm_ready();
         return check_pushforward(*ctx, *cm);
       }},
      {12, determinism},
  };

  int failed = 0, ran = 0;
  for (auto& [k, f] : criteria) {
    if (!wanted(k)) continue;
    CheckResult r;
    try {
      r = f();
    } catch (const std::exception& e) {
      r.name = "criterion " + std::to_string(k);
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    ++ran;
    if (!r.pass) ++failed;
    std::printf("%s %2d %s (%.1f s): %s\n", r.pass ? "PASS" : "FAIL", k, r.name.c_str(), r.seconds, r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria evaluated, %d passed, %d failed\n", ran, ran - failed, failed);
  return failed == 0 ? 0 : 1;
}
