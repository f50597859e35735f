#include "ndlr/measure.hpp"

namespace ndlr {

namespace {

// `spine`: ancestors counted for a letrec at this node; `depth`: all ancestors
void walk(const Expr& e, std::size_t spine, std::size_t depth, LllMeasure& m, std::size_t& depth_sum) {
  if (const auto* c = e.get_if<Con>()) {
    for (const auto& a : c->args) walk(a, spine, depth + 1, m, depth_sum);
  } else if (const auto* ch = e.get_if<Choice>()) {
    walk(ch->left, spine, depth + 1, m, depth_sum);
    walk(ch->right, spine, depth + 1, m, depth_sum);
  } else if (const auto* cs = e.get_if<Case>()) {
    walk(cs->scrutinee, spine + 1, depth + 1, m, depth_sum);
    for (const auto& alt : cs->alts) walk(alt.rhs, spine, depth + 1, m, depth_sum);
  } else if (const auto* ap = e.get_if<App>()) {
    walk(ap->fun, spine + 1, depth + 1, m, depth_sum);
    walk(ap->arg, spine, depth + 1, m, depth_sum);
  } else if (const auto* l = e.get_if<Lam>()) {
    walk(l->body, spine, depth + 1, m, depth_sum);
  } else if (const auto* lr = e.get_if<Letrec>()) {
    ++m.letrec_count;
    m.spine_sum += spine;
    depth_sum += depth;
    for (const auto& b : lr->bindings) walk(b.rhs, spine, depth + 1, m, depth_sum);
    walk(lr->body, spine, depth + 1, m, depth_sum);
  }
}

}  // namespace

LllMeasure lll_measure(const Expr& e) {
  LllMeasure m;
  std::size_t depth_sum = 0;
  walk(e, 0, 0, m, depth_sum);
  return m;
}

std::size_t letrec_depth_sum(const Expr& e) {
  LllMeasure m;
  std::size_t depth_sum = 0;
  walk(e, 0, 0, m, depth_sum);
  return depth_sum;
}

}  // namespace ndlr
