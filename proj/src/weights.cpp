#include "vinlab/weights.hpp"

#include <json.hpp>

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "vinlab/rational_linalg.hpp"

namespace vinlab {

namespace {

// one-variable linear interpolation solve: c = x0 + t (x1 - x0)
Rational solve_weight(const Rational& c, const Rational& x0, const Rational& x1) {
  if (x1 == x0) throw DegenerateExponent("weight relation: degenerate interpolation");
  return (c - x0) / (x1 - x0);
}

void check_range(const WeightSystem& ws) {
  // weights are guaranteed in [0,1] only for Delta in (n, n+1]
  if (ws.Delta > ws.n && ws.Delta <= ws.n + 1) {
    for (const auto& a : ws.alpha)
      if (a < 0 || a > 1) throw DegenerateExponent("alpha out of [0,1] in the valid band");
    for (const auto& b : ws.beta)
      if (b < 0 || b > 1) throw DegenerateExponent("beta out of [0,1] in the valid band");
  }
}

}  // namespace

WeightSystem weights_from_relations(int n, const Rational& p) {
  if (n < 2) throw ValidationError("weights: n >= 2");
  if (p == 0) throw DegenerateExponent("weights: p = 0");
  WeightSystem ws;
  ws.n = n;
  ws.p = p;
  ws.Delta = p / n;
  const Rational& D = ws.Delta;
  if (D == 0) throw DegenerateExponent("weights: Delta = 0");
  for (int j = 1; j <= n - 1; ++j) {
    if (D == j) throw DegenerateExponent("weights: Delta hits a pole");
    // 1/(j D) = (1-a)/(j(j+1)) + a/((j+1) D)
    ws.alpha.push_back(solve_weight(Rational(1) / (j * D), Rational(1, j * (j + 1)),
                                    Rational(1) / ((j + 1) * D)));
  }
  for (int j = 2; j <= n - 1; ++j) {
    if (D == j - 1) throw DegenerateExponent("weights: Delta hits a pole");
    // 1/(j(j+1)) = (1-b)/((j-1)j) + b/(j D)
    ws.beta.push_back(solve_weight(Rational(1, j * (j + 1)), Rational(1, (j - 1) * j),
                                   Rational(1) / (j * D)));
  }
  check_range(ws);
  return ws;
}

WeightSystem weights_closed_form(int n, const Rational& p) {
  if (n < 2) throw ValidationError("weights: n >= 2");
  WeightSystem ws;
  ws.n = n;
  ws.p = p;
  ws.Delta = p / n;
  const Rational& D = ws.Delta;
  for (int j = 1; j <= n - 1; ++j) {
    if (D == j) throw DegenerateExponent("weights: Delta hits a pole");
    ws.alpha.push_back((D - (j + 1)) / (D - j));
  }
  for (int j = 2; j <= n - 1; ++j) {
    if (D == j - 1) throw DegenerateExponent("weights: Delta hits a pole");
    ws.beta.push_back(2 * D / ((j + 1) * (D - j + 1)));
  }
  check_range(ws);
  return ws;
}

GammaB gamma_b_n3(const Rational& p, int r) {
  if (r < 0) throw ValidationError("gamma_b_n3: r >= 0");
  const WeightSystem ws = weights_from_relations(3, p);
  const Rational a1 = ws.a(1), a2 = ws.a(2), b2 = ws.b(2);
  GammaB out;
  out.gamma.push_back(1 - a1);
  out.b.push_back(Rational(2));
  const Rational head = a1 * (1 - a2) * (1 - b2);
  const Rational ratio = (1 - a2) * b2;
  Rational g = head, b = Rational(3);
  for (int i = 1; i <= r; ++i) {
    out.gamma.push_back(g);
    out.b.push_back(b);
    g *= ratio;
    b *= Rational(3, 2);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bifurcation rule shared by the tree and the series dynamics
// ---------------------------------------------------------------------------

namespace {

struct Branching {
  Rational pivot_weight;                         // A_p leaf
  std::vector<std::pair<int, Rational>> kids;    // (type k, weight), k = 2..n
};

Branching branch_rule(const WeightSystem& ws, int j) {
  const int n = ws.n;
  Branching br;
  const Rational aj = ws.a(j);
  if (aj != 0) br.kids.emplace_back(j + 1, aj);  // type n is the inert D_p
  Rational tail = 1 - aj;  // (1-alpha_j) prod_{i>k..j} (1-beta_i), peeled downward
  for (int k = j; k >= 2; --k) {
    const Rational bk = ws.b(k);
    if (tail * bk != 0) br.kids.emplace_back(k, tail * bk);
    tail *= (1 - bk);
  }
  br.pivot_weight = tail;
  return br;
}

}  // namespace

// ---------------------------------------------------------------------------
// Explicit tree
// ---------------------------------------------------------------------------

IterationTree build_tree(int n, const Rational& p, int depth, int max_nodes) {
  if (n < 2) throw ValidationError("build_tree: n >= 2");
  if (depth < 1) throw ValidationError("build_tree: depth >= 1");
  IterationTree tree;
  tree.n = n;
  tree.p = p;
  tree.weights = weights_from_relations(n, p);

  TreeNode root;
  root.kind = TreeNode::Kind::Branch;
  root.type_j = 1;
  root.edge_weight = 1;
  root.path_weight = 1;
  root.born_exponent = 1;
  root.ball_exponent = 2;  // processed at born * (j+1)/j
  tree.nodes.push_back(root);

  // (processing exponent, creation index), ascending
  std::set<std::pair<Rational, int>> frontier;
  frontier.insert({Rational(2), 0});

  for (int event = 0; event < depth; ++event) {
    if (frontier.empty()) break;
    auto [expo, idx] = *frontier.begin();
    frontier.erase(frontier.begin());
    TreeNode& node = tree.nodes[idx];
    node.processed = true;
    const Branching br = branch_rule(tree.weights, node.type_j);

    auto add_child = [&](TreeNode&& child) {
      if (static_cast<int>(tree.nodes.size()) >= max_nodes)
        throw DepthBudgetExceeded("build_tree: node budget exceeded");
      child.parent = idx;
      tree.nodes.push_back(std::move(child));
      tree.nodes[idx].children.push_back(static_cast<int>(tree.nodes.size()) - 1);
      return static_cast<int>(tree.nodes.size()) - 1;
    };

    {
      TreeNode pivot;
      pivot.kind = TreeNode::Kind::Pivot;
      pivot.edge_weight = br.pivot_weight;
      pivot.path_weight = tree.nodes[idx].path_weight * br.pivot_weight;
      pivot.born_exponent = expo;
      pivot.ball_exponent = expo;
      add_child(std::move(pivot));
    }
    for (const auto& [k, w] : br.kids) {
      TreeNode child;
      child.type_j = k;
      child.edge_weight = w;
      child.path_weight = tree.nodes[idx].path_weight * w;
      child.born_exponent = expo;
      if (k == n) {
        child.kind = TreeNode::Kind::Inert;
        child.ball_exponent = expo;
        add_child(std::move(child));
      } else {
        child.kind = TreeNode::Kind::Branch;
        child.ball_exponent = expo * Rational(k + 1, k);
        int ci = add_child(std::move(child));
        frontier.insert({tree.nodes[ci].ball_exponent, ci});
      }
    }
    tree.processings = event + 1;
  }
  return tree;
}

GammaB IterationTree::gamma_b() const {
  std::map<Rational, Rational> agg;
  for (const auto& node : nodes)
    if (node.kind == TreeNode::Kind::Pivot) agg[node.ball_exponent] += node.path_weight;
  GammaB out;
  for (const auto& [b, g] : agg) {
    out.b.push_back(b);
    out.gamma.push_back(g);
  }
  return out;
}

std::vector<int> IterationTree::frontier() const {
  std::vector<int> out;
  for (size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].kind == TreeNode::Kind::Branch && !nodes[i].processed)
      out.push_back(static_cast<int>(i));
  return out;
}

namespace {

std::string node_label(const IterationTree& tree, const TreeNode& node) {
  switch (node.kind) {
    case TreeNode::Kind::Pivot:
      return "A[p] b=" + to_string(node.ball_exponent);
    case TreeNode::Kind::Inert:
      return "D[p]";
    default:
      return "D[" + std::to_string(node.type_j) + "p/" + std::to_string(tree.n) + "]" +
             (node.processed ? "" : " (pending)");
  }
}

void text_rec(const IterationTree& tree, int idx, int indent, std::ostringstream& os) {
  const TreeNode& node = tree.nodes[idx];
  os << std::string(2 * indent, ' ') << node_label(tree, node) << " w=" << to_string(node.edge_weight)
     << " born=" << to_string(node.born_exponent) << "\n";
  for (int c : node.children) text_rec(tree, c, indent + 1, os);
}

nlohmann::ordered_json json_rec(const IterationTree& tree, int idx) {
  const TreeNode& node = tree.nodes[idx];
  nlohmann::ordered_json j;
  switch (node.kind) {
    case TreeNode::Kind::Pivot: j["kind"] = "pivot"; break;
    case TreeNode::Kind::Inert: j["kind"] = "inert"; break;
    default: j["kind"] = "branch";
  }
  if (node.kind != TreeNode::Kind::Pivot) j["type"] = node.type_j;
  j["weight_num"] = num(node.edge_weight).str();
  j["weight_den"] = den(node.edge_weight).str();
  j["ball_exponent_num"] = num(node.ball_exponent).str();
  j["ball_exponent_den"] = den(node.ball_exponent).str();
  if (node.kind == TreeNode::Kind::Branch) j["processed"] = node.processed;
  if (!node.children.empty()) {
    auto& kids = j["children"] = nlohmann::ordered_json::array();
    for (int c : node.children) kids.push_back(json_rec(tree, c));
  }
  return j;
}

}  // namespace

std::string IterationTree::to_text() const {
  std::ostringstream os;
  os << "iteration tree n=" << n << " p=" << vinlab::to_string(p) << " processings=" << processings
     << "\n";
  text_rec(*this, 0, 0, os);
  return os.str();
}

std::string IterationTree::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["p_num"] = num(p).str();
  j["p_den"] = den(p).str();
  j["processings"] = processings;
  j["root"] = json_rec(*this, 0);
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Series dynamics
// ---------------------------------------------------------------------------

std::vector<Rational> future_contributions(const WeightSystem& ws) {
  const int n = ws.n;
  const int m = n - 2;  // live types 2..n-1
  if (m <= 0) return {};
  RationalMatrix A = RationalMatrix::Zero(m, m);
  RationalVector rhs(m);
  for (int j = 2; j <= n - 1; ++j) {
    const Branching br = branch_rule(ws, j);
    const Rational f(j + 1, j);
    A(j - 2, j - 2) = 1;
    for (const auto& [k, w] : br.kids)
      if (k <= n - 1) A(j - 2, k - 2) -= f * w;
    rhs(j - 2) = f * br.pivot_weight;
  }
  RationalVector F = solve_linear_exact(A, rhs);
  std::vector<Rational> out(m);
  for (int i = 0; i < m; ++i) out[i] = F(i);
  return out;
}

Rational omega1_from_future(const WeightSystem& ws) {
  const Rational a1 = ws.a(1);
  Rational F2 = 0;
  if (ws.n >= 3) F2 = future_contributions(ws)[0];
  return 2 * (1 - a1) + 2 * a1 * F2;
}

namespace {

template <typename Scalar>
Scalar to_scalar(const Rational& q);
template <>
Rational to_scalar<Rational>(const Rational& q) { return q; }
template <>
double to_scalar<double>(const Rational& q) { return to_double(q); }

template <typename Scalar>
SeriesResult<Scalar> series_impl(int n, const Rational& p, int r) {
  if (r < 0) throw ValidationError("omega1_series: r >= 0");
  const WeightSystem ws = weights_from_relations(n, p);

  // masses aggregated by (type, exact exponent); generation g = number of
  // bifurcations between the root and a node's birth
  using Bucket = std::map<std::pair<int, Rational>, Scalar>;
  Bucket current;
  current[{1, Rational(1)}] = Scalar(1);

  SeriesResult<Scalar> out;
  std::map<int, Branching> rules;
  for (int j = 1; j <= n - 1; ++j) rules[j] = branch_rule(ws, j);

  for (int g = 0; g <= r && !current.empty(); ++g) {
    Bucket next;
    for (const auto& [key, mass] : current) {
      const auto& [j, born] = key;
      const Rational expo = born * Rational(j + 1, j);
      const Scalar e = to_scalar<Scalar>(expo);
      const Branching& br = rules[j];
      out.sum_b_gamma += mass * to_scalar<Scalar>(br.pivot_weight) * e;
      out.sum_gamma += mass * to_scalar<Scalar>(br.pivot_weight);
      for (const auto& [k, w] : br.kids)
        if (k <= n - 1) next[{k, expo}] += mass * to_scalar<Scalar>(w);
    }
    current.swap(next);
    out.generations = g + 1;
  }

  // exact remainder: each frontier node contributes mass * exponent * F_type
  const auto F = future_contributions(ws);
  for (const auto& [key, mass] : current) {
    const auto& [j, born] = key;
    out.frontier_future += mass * to_scalar<Scalar>(born) * to_scalar<Scalar>(F[j - 2]);
  }

  // crude geometric tail from the dominant exponent-weighted branch ratio
  double rho = 0;
  for (int j = 2; j <= n - 1; ++j) {
    double row = 0;
    for (const auto& [k, w] : rules[j].kids)
      if (k <= n - 1) row += to_double(w) * (j + 1.0) / j;
    rho = std::max(rho, row);
  }
  double frontier_be = 0;
  for (const auto& [key, mass] : current) {
    double m;
    if constexpr (std::is_same_v<Scalar, double>)
      m = mass;
    else
      m = to_double(mass);
    frontier_be += m * to_double(key.second);
  }
  out.geometric_tail_bound =
      (rho < 1.0) ? frontier_be * 2.0 / (1.0 - rho) : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace

SeriesResult<double> omega1_series(int n, const Rational& p, int r) {
  return series_impl<double>(n, p, r);
}

SeriesResult<Rational> omega1_series_exact(int n, const Rational& p, int r) {
  return series_impl<Rational>(n, p, r);
}

}  // namespace vinlab
