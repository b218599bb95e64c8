#include "mockplectic/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  mockplectic::RunConfig cfg;
  CLI::App app{"mockplectic: p-adic L-values, Stark-Heegner points and CM mock plectic invariants"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--curve", cfg.curve, "a1,a2,a3,a4,a6")->required();
    sub->add_option("--p", cfg.p, "prime conductor")->required();
    sub->add_option("--threads", cfg.threads, "worker threads");
    sub->add_option("--out", cfg.out, "write JSON here instead of stdout");
  };
  auto* lp = app.add_subcommand("lp", "L_p(E,1) and L_p'(E,1)");
  auto* tate = app.add_subcommand("tate-q", "Tate period");
  auto* mtt = app.add_subcommand("mtt", "Mazur-Tate-Teitelbaum check");
  auto* sh = app.add_subcommand("sh-point", "Stark-Heegner point");
  auto* cm = app.add_subcommand("cm-invariant", "CM mock plectic invariant");
  auto* check = app.add_subcommand("check", "exact invariant suite");
  for (auto* s : {lp, tate, mtt, sh, cm, check}) common(s);
  for (auto* s : {lp, mtt, sh}) s->add_option("--depth", cfg.depth, "tree depth");
  for (auto* s : {tate, sh, cm}) s->add_option("--prec", cfg.prec, "p-adic precision");
  sh->add_option("--form", cfg.form, "A,B,C")->required();
  sh->add_option("--recognize", cfg.recognize, "height bound for recognition");
  cm->add_option("--disc", cfg.disc, "negative fundamental discriminant");
  cm->add_option("--level", cfg.level, "level n");

  CLI11_PARSE(app, argc, argv);
  cfg.command = app.get_subcommands().front()->get_name();

  std::string json;
  int status = mockplectic::run(cfg, json);
  if (cfg.out.empty()) {
    std::cout << json;
  } else {
    std::ofstream f(cfg.out);
    if (!f) {
      std::cerr << "cannot write " << cfg.out << "\n";
      return 3;
    }
    f << json;
  }
  return status;
}
