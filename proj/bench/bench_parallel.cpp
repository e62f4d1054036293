// Serial vs OpenMP chart parsing and annotation on PP-attachment chains.
#include <chrono>
#include <cstdio>
#include <string>

#include "refforest/annotate.hpp"
#include "refforest/env_store.hpp"
#include "refforest/forest.hpp"
#include "refforest/grammar.hpp"

using namespace refforest;

namespace {

template <class F>
double time_ms(F&& f, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

Grammar chain_grammar() {
  return Grammar::load(
      "cat NP referential\ncat PP referential\ncat P\nstart NP\n"
      "rule NP -> NP PP : modifier\nrule PP -> P NP : argument\n"
      "lex block NP pred block\nlex near P rel near 2\n");
}

EnvironmentDb chain_env(int n) {
  std::string text;
  for (int i = 0; i < n; ++i) text += "entity x" + std::to_string(i) + " block\n";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && (i * 7 + j * 3) % 5 == 0) {
        text += "rel near x" + std::to_string(i) + " x" + std::to_string(j) + "\n";
      }
    }
  }
  return EnvironmentDb::load(text);
}

}  // namespace

int main() {
  const Grammar g = chain_grammar();
  const EnvironmentDb db = chain_env(200);
  std::printf("%-4s %8s %12s %12s %12s %12s\n", "k", "disj", "cky_serial", "cky_omp", "ann_serial", "ann_omp");
  for (int k = 4; k <= 40; k += 4) {
    std::vector<std::string> words{"block"};
    for (int i = 0; i < k; ++i) {
      words.push_back("near");
      words.push_back("block");
    }
    const int reps = k < 20 ? 20 : 3;
    Forest f = cky_parse_serial(g, words);
    const double cs = time_ms([&] { f = cky_parse_serial(g, words); }, reps);
    const double cp = time_ms([&] { f = cky_parse(g, words); }, reps);
    AnnotatedForest af = annotate_forest_serial(f, g, db);
    const double as = time_ms([&] { af = annotate_forest_serial(f, g, db); }, reps);
    const double ap = time_ms([&] { af = annotate_forest(f, g, db); }, reps);
    std::printf("%-4d %8zu %10.3fms %10.3fms %10.3fms %10.3fms\n", k, f.disj_nodes().size(), cs, cp, as, ap);
  }
}
