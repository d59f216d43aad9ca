//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef AGFN_SMILES_HPP_
#define AGFN_SMILES_HPP_

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agfn/canon.hpp"
#include "agfn/molgraph.hpp"
#include "agfn/resonance.hpp"

namespace agfn {

class SmilesError: public std::runtime_error {
public:
  SmilesError(std::size_t position, const std::string &what)
      : std::runtime_error("SMILES error at position " + std::to_string(position)
                           + ": " + what),
        position_(position) { }

  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

// Text form of a canonical key: canonical SMILES without stereo tags.
struct CanonicalKey {
  std::string text;

  friend auto operator<=>(const CanonicalKey &, const CanonicalKey &) = default;
};

namespace internal {

struct ParsedAtom {
  Element element;
  bool aromatic = false;
  bool bracket = false;
  int hcount = 0;
  Chirality chirality = Chirality::none;
  std::size_t position = 0;
};

struct ParsedBond {
  int u, v;
  int order;  // 1..3, or 0 for "aromatic / unspecified between aromatics"
  bool explicit_symbol;
  bool aromatic_symbol;
};

class SmilesParser {
public:
  explicit SmilesParser(std::string_view s): s_(s) { }

  void run() {
    if (s_.empty())
      throw SmilesError(0, "empty string");
    int prev = -1;
    std::vector<int> branch_stack;
    char pending_bond = 0;
    std::size_t bond_pos = 0;
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '(') {
        if (prev < 0)
          throw SmilesError(pos_, "branch before any atom");
        if (pending_bond)
          throw SmilesError(pos_, "bond symbol before branch");
        branch_stack.push_back(prev);
        ++pos_;
        continue;
      }
      if (c == ')') {
        if (branch_stack.empty())
          throw SmilesError(pos_, "unbalanced ')'");
        if (pending_bond)
          throw SmilesError(pos_, "dangling bond symbol");
        prev = branch_stack.back();
        branch_stack.pop_back();
        ++pos_;
        continue;
      }
      if (c == '-' || c == '=' || c == '#' || c == ':') {
        if (pending_bond)
          throw SmilesError(pos_, "consecutive bond symbols");
        pending_bond = c;
        bond_pos = pos_;
        ++pos_;
        continue;
      }
      if (c == '/' || c == '\\')
        throw SmilesError(pos_, std::string("unsupported stereo bond '") + c
                                    + "'");
      if (c == '$')
        throw SmilesError(pos_, "unsupported quadruple bond '$'");
      if (c == '.')
        throw SmilesError(pos_, "multi-fragment input ('.') not supported");
      if (c == '*')
        throw SmilesError(pos_, "wildcard atom '*' not supported");
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        if (prev < 0)
          throw SmilesError(pos_, "ring closure before any atom");
        std::size_t rpos = pos_;
        int num = read_ring_number();
        ring_closure(prev, num, pending_bond, rpos);
        pending_bond = 0;
        continue;
      }
      std::size_t apos = pos_;
      int a = read_atom();
      if (prev >= 0) {
        add_bond(prev, a, pending_bond, pending_bond ? bond_pos : apos);
      } else if (pending_bond) {
        throw SmilesError(bond_pos, "bond symbol before first atom");
      }
      pending_bond = 0;
      prev = a;
    }
    if (pending_bond)
      throw SmilesError(bond_pos, "dangling bond symbol");
    if (!branch_stack.empty())
      throw SmilesError(s_.size(), "unclosed branch '('");
    if (!open_rings_.empty())
      throw SmilesError(open_rings_.begin()->second.position,
                        "unclosed ring bond "
                            + std::to_string(open_rings_.begin()->first));
  }

  std::vector<ParsedAtom> atoms;
  std::vector<ParsedBond> bonds;

private:
  struct OpenRing {
    int atom;
    char bond;
    std::size_t position;
  };

  int read_ring_number() {
    if (s_[pos_] == '%') {
      if (pos_ + 2 >= s_.size() + 0 || !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))
          || pos_ + 2 >= s_.size()
          || !std::isdigit(static_cast<unsigned char>(s_[pos_ + 2])))
        throw SmilesError(pos_, "malformed '%nn' ring closure");
      int n = (s_[pos_ + 1] - '0') * 10 + (s_[pos_ + 2] - '0');
      pos_ += 3;
      return n;
    }
    return s_[pos_++] - '0';
  }

  void ring_closure(int atom, int num, char bond, std::size_t position) {
    auto it = open_rings_.find(num);
    if (it == open_rings_.end()) {
      open_rings_[num] = { atom, bond, position };
      return;
    }
    OpenRing open = it->second;
    open_rings_.erase(it);
    char sym = bond ? bond : open.bond;
    if (bond && open.bond && bond != open.bond)
      throw SmilesError(position, "conflicting ring-closure bond symbols");
    if (open.atom == atom)
      throw SmilesError(position, "ring closure onto the same atom");
    add_bond(open.atom, atom, sym, position);
  }

  void add_bond(int u, int v, char sym, std::size_t position) {
    for (const auto &b: bonds) {
      if ((b.u == u && b.v == v) || (b.u == v && b.v == u))
        throw SmilesError(position, "duplicate bond");
    }
    ParsedBond b { u, v, 1, sym != 0, sym == ':' };
    switch (sym) {
    case '=':
      b.order = 2;
      break;
    case '#':
      b.order = 3;
      break;
    case ':':
      b.order = 0;
      break;
    default:
      b.order = 1;
      break;
    }
    bonds.push_back(b);
  }

  int read_atom() {
    ParsedAtom a;
    a.position = pos_;
    char c = s_[pos_];
    if (c == '[') {
      read_bracket_atom(a);
    } else {
      std::string sym;
      if (c == 'C' && pos_ + 1 < s_.size() && s_[pos_ + 1] == 'l') {
        sym = "Cl";
        pos_ += 2;
      } else if (c == 'B' && pos_ + 1 < s_.size() && s_[pos_ + 1] == 'r') {
        sym = "Br";
        pos_ += 2;
      } else if (std::string_view("CNOSPFI").find(c) != std::string_view::npos) {
        sym = std::string(1, c);
        ++pos_;
      } else if (std::string_view("cnos").find(c) != std::string_view::npos) {
        sym = std::string(1, static_cast<char>(std::toupper(c)));
        a.aromatic = true;
        ++pos_;
      } else {
        throw SmilesError(pos_, std::string("unsupported atom token '") + c
                                    + "'");
      }
      a.element = *element_from_symbol(sym);
    }
    atoms.push_back(a);
    return static_cast<int>(atoms.size()) - 1;
  }

  void read_bracket_atom(ParsedAtom &a) {
    const std::size_t start = pos_;
    const std::size_t end = s_.find(']', pos_);
    if (end == std::string_view::npos)
      throw SmilesError(pos_, "unterminated bracket atom");
    std::string_view body = s_.substr(pos_ + 1, end - pos_ - 1);
    const std::string token(s_.substr(start, end - start + 1));
    std::size_t i = 0;
    if (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i])))
      throw SmilesError(start, "isotopes not supported: " + token);
    std::string sym;
    if (body.substr(i, 2) == "Cl" || body.substr(i, 2) == "Br") {
      sym = std::string(body.substr(i, 2));
      i += 2;
    } else if (i < body.size()
               && std::string_view("CNOSPFI").find(body[i])
                      != std::string_view::npos) {
      sym = std::string(1, body[i]);
      ++i;
    } else if (i < body.size()
               && std::string_view("cnosp").find(body[i])
                      != std::string_view::npos) {
      sym = std::string(1, static_cast<char>(std::toupper(body[i])));
      a.aromatic = true;
      ++i;
    } else {
      throw SmilesError(start, "unsupported element in " + token);
    }
    // Two-letter symbols outside the vocabulary, e.g. [Cu], [Si], [Se].
    if (i < body.size() && std::islower(static_cast<unsigned char>(body[i]))
        && body[i] != 'H')
      throw SmilesError(start, "unsupported element in " + token);
    a.element = *element_from_symbol(sym);
    a.bracket = true;
    if (i < body.size() && body[i] == '@') {
      ++i;
      if (i < body.size() && body[i] == '@') {
        ++i;
        a.chirality = Chirality::r;
      } else {
        a.chirality = Chirality::s;
      }
    }
    if (i < body.size() && body[i] == 'H') {
      ++i;
      a.hcount = 1;
      if (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
        a.hcount = body[i] - '0';
        ++i;
      }
    }
    if (i < body.size() && (body[i] == '+' || body[i] == '-'))
      throw SmilesError(start, "charges not supported: " + token);
    if (i < body.size() && body[i] == ':')
      throw SmilesError(start, "atom classes not supported: " + token);
    if (i != body.size())
      throw SmilesError(start, "malformed bracket atom " + token);
    pos_ = end + 1;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::map<int, OpenRing> open_rings_;
};

}  // namespace internal

// Parses the supported SMILES subset into a connected, kekulised MolGraph.
inline MolGraph parse_smiles(std::string_view s) {
  internal::SmilesParser p(s);
  p.run();
  const int n = static_cast<int>(p.atoms.size());

  MolGraph g;
  for (const auto &a: p.atoms)
    g.add_atom(a.element, a.chirality);
  for (const auto &b: p.bonds)
    g.add_bond(b.u, b.v, BondOrder::single);
  if (!g.is_connected())
    throw SmilesError(0, "disconnected graph");

  // Aromatic bonds: explicit ':' or implicit ring bonds between aromatic atoms.
  auto ring = ring_bond_flags(g);
  std::vector<char> aromatic_bond(p.bonds.size(), 0);
  for (std::size_t i = 0; i < p.bonds.size(); ++i) {
    const auto &b = p.bonds[i];
    bool both = p.atoms[b.u].aromatic && p.atoms[b.v].aromatic;
    if (b.aromatic_symbol) {
      if (!both)
        throw SmilesError(p.atoms[b.v].position,
                          "aromatic bond between non-aromatic atoms");
      aromatic_bond[i] = 1;
    } else if (!b.explicit_symbol && both) {
      const int gb = g.find_bond(b.u, b.v);
      aromatic_bond[i] = ring[gb];
    }
  }

  // Decide which aromatic atoms still need a double bond.
  std::vector<char> needs(n, 0);
  for (int v = 0; v < n; ++v) {
    const auto &a = p.atoms[v];
    if (!a.aromatic)
      continue;
    int current = a.bracket ? a.hcount : 0;
    bool has_multiple = false;
    int arom = 0;
    for (std::size_t i = 0; i < p.bonds.size(); ++i) {
      const auto &b = p.bonds[i];
      if (b.u != v && b.v != v)
        continue;
      if (aromatic_bond[i]) {
        ++arom;
        current += 1;
      } else {
        current += b.order;
        has_multiple |= b.order >= 2;
      }
    }
    if (arom == 0)
      throw SmilesError(a.position, "aromatic atom outside an aromatic ring");
    if (has_multiple)
      continue;
    int target = -1;
    for (int allowed: element_data(a.element).allowed_valences()) {
      if (allowed >= current) {
        target = allowed;
        break;
      }
    }
    if (a.bracket) {
      needs[v] = target >= 0 && current + 1 <= target;
    } else {
      // Organic-subset aromatic atoms take the lowest valence.
      needs[v] = current + 1 <= element_data(a.element).min_valence();
    }
  }
  internal::MatchAdjacency adj(n);
  for (std::size_t i = 0; i < p.bonds.size(); ++i) {
    const auto &b = p.bonds[i];
    if (aromatic_bond[i] && needs[b.u] && needs[b.v]) {
      adj[b.u].emplace_back(b.v, static_cast<int>(i));
      adj[b.v].emplace_back(b.u, static_cast<int>(i));
    }
  }
  std::vector<int> mate(n, -1);
  if (!internal::match_double_bonds(adj, mate, needs))
    throw SmilesError(0, "kekulization failed: no alternating bond assignment");

  for (std::size_t i = 0; i < p.bonds.size(); ++i) {
    const auto &b = p.bonds[i];
    int order = b.order;
    if (aromatic_bond[i])
      order = mate[b.u] == b.v ? 2 : 1;
    else if (order == 0)
      order = 1;
    g.set_bond_order(g.find_bond(b.u, b.v), order_from_value(order));
  }

  for (int v = 0; v < n; ++v) {
    const auto &a = p.atoms[v];
    const int ev = explicit_valence(g, v);
    if (ev > element_data(a.element).max_valence())
      throw SmilesError(a.position, "valence violation on "
                                        + std::string(symbol(a.element)));
    if (a.bracket && implicit_hydrogens(g, v) != a.hcount)
      throw SmilesError(a.position,
                        "hydrogen count inconsistent with valence model");
  }
  return g;
}

namespace internal {

inline void write_atom(std::ostringstream &os, const MolGraph &g, int v,
                       bool stereo, bool lowercase) {
  const Atom &a = g.atom(v);
  if (lowercase) {
    for (char c: symbol(a.element))
      os << static_cast<char>(std::tolower(c));
    return;
  }
  if (!stereo || a.chirality == Chirality::none) {
    os << symbol(a.element);
    return;
  }
  os << '[' << symbol(a.element)
     << (a.chirality == Chirality::r ? "@@" : "@");
  const int h = implicit_hydrogens(g, v);
  if (h > 0) {
    os << 'H';
    if (h > 1)
      os << h;
  }
  os << ']';
}

inline void write_bond_symbol(std::ostringstream &os, BondOrder o) {
  switch (o) {
  case BondOrder::unset:
    os << '~';
    break;
  case BondOrder::double_:
    os << '=';
    break;
  case BondOrder::triple:
    os << '#';
    break;
  default:
    break;
  }
}

// DFS emission guided by `rank` (lower first). Deterministic for fixed ranks.
// Atoms on resonant bonds are written in lowercase, and resonant bonds carry
// no symbol; other bonds between two such atoms are written explicitly.
inline std::string emit_smiles(const MolGraph &g, std::span<const int> rank,
                               bool stereo, std::span<const char> resonant = {}) {
  const int n = g.num_atoms();
  std::ostringstream os;
  std::vector<char> lower(n, 0);
  if (!resonant.empty()) {
    for (int b = 0; b < g.num_bonds(); ++b) {
      if (resonant[b])
        lower[g.bond(b).u] = lower[g.bond(b).v] = 1;
    }
  }
  auto bond_symbol = [&](int b) {
    if (!resonant.empty() && resonant[b])
      return;
    const Bond &bd = g.bond(b);
    if (bd.order == BondOrder::single && lower[bd.u] && lower[bd.v])
      os << '-';
    else
      write_bond_symbol(os, bd.order);
  };
  int root = 0;
  for (int v = 1; v < n; ++v) {
    if (rank[v] < rank[root])
      root = v;
  }
  auto sorted_neighbors = [&](int v) {
    std::vector<std::pair<int, int>> nb;  // (atom, bond)
    for (int b: g.incident(v))
      nb.emplace_back(g.bond(b).other(v), b);
    std::sort(nb.begin(), nb.end(), [&](auto x, auto y) {
      return rank[x.first] < rank[y.first];
    });
    return nb;
  };

  // Pass 1: spanning tree and ring-closure bonds.
  std::vector<int> visit_order(n, -1);
  std::vector<int> parent_bond(n, -1);
  std::vector<std::vector<int>> children(n);
  std::vector<char> tree_bond(g.num_bonds(), 0);
  int counter = 0;
  std::vector<std::pair<int, int>> stack { { root, -1 } };
  // Recursive DFS expressed with an explicit stack of neighbour cursors.
  struct Frame {
    int v;
    std::vector<std::pair<int, int>> nb;
    std::size_t next;
  };
  std::vector<Frame> frames;
  visit_order[root] = counter++;
  frames.push_back({ root, sorted_neighbors(root), 0 });
  while (!frames.empty()) {
    Frame &f = frames.back();
    if (f.next >= f.nb.size()) {
      frames.pop_back();
      continue;
    }
    auto [w, b] = f.nb[f.next++];
    if (visit_order[w] >= 0)
      continue;
    visit_order[w] = counter++;
    parent_bond[w] = b;
    tree_bond[b] = 1;
    children[f.v].push_back(w);
    frames.push_back({ w, sorted_neighbors(w), 0 });
  }

  // Ring-closure events per atom, ordered by partner rank.
  std::vector<std::vector<std::pair<int, int>>> ring_events(n);
  for (int b = 0; b < g.num_bonds(); ++b) {
    if (tree_bond[b])
      continue;
    const Bond &bd = g.bond(b);
    ring_events[bd.u].emplace_back(bd.v, b);
    ring_events[bd.v].emplace_back(bd.u, b);
  }
  for (auto &ev: ring_events) {
    std::sort(ev.begin(), ev.end(), [&](auto x, auto y) {
      return visit_order[x.first] < visit_order[y.first];
    });
  }

  std::vector<int> digit_of_bond(g.num_bonds(), -1);
  std::vector<char> digit_used(100, 0);

  auto emit_digit = [&](int d) {
    if (d < 10)
      os << d;
    else
      os << '%' << d;
  };

  // Pass 2: emission.
  struct EmitFrame {
    int v;
    std::size_t child;
  };
  std::vector<EmitFrame> es;
  auto open_atom = [&](int v) {
    write_atom(os, g, v, stereo, lower[v]);
    std::vector<int> release;
    for (auto [w, b]: ring_events[v]) {
      if (digit_of_bond[b] >= 0) {
        emit_digit(digit_of_bond[b]);
        release.push_back(digit_of_bond[b]);
      } else {
        int d = 1;
        while (digit_used[d])
          ++d;
        digit_used[d] = 1;
        digit_of_bond[b] = d;
        bond_symbol(b);
        emit_digit(d);
      }
      (void)w;
    }
    for (int d: release)
      digit_used[d] = 0;
  };
  open_atom(root);
  es.push_back({ root, 0 });
  while (!es.empty()) {
    EmitFrame &f = es.back();
    const auto &ch = children[f.v];
    if (f.child >= ch.size()) {
      es.pop_back();
      if (!es.empty()) {
        const EmitFrame &pf = es.back();
        if (pf.child < children[pf.v].size())
          os << ')';
      }
      continue;
    }
    int w = ch[f.child++];
    if (f.child < ch.size())
      os << '(';
    bond_symbol(parent_bond[w]);
    open_atom(w);
    es.push_back({ w, 0 });
  }
  return os.str();
}

}  // namespace internal

// Kekulised SMILES in atom-index order. Throws for empty graphs or unset
// bonds.
inline std::string write_smiles(const MolGraph &g) {
  if (g.empty())
    throw GraphError("cannot write SMILES for an empty graph");
  if (!all_bonds_set(g))
    throw GraphError("cannot write SMILES with unset bond orders");
  if (!g.is_connected())
    throw GraphError("cannot write SMILES for a disconnected graph");
  std::vector<int> rank(g.num_atoms());
  std::iota(rank.begin(), rank.end(), 0);
  return internal::emit_smiles(g, rank, true);
}

// Canonical atom ranks; stereo is ignored and all Kekule structures of a
// molecule rank alike.
inline std::vector<int> canonical_ranks(const MolGraph &g,
                                        std::span<const char> resonant) {
  return canonical_form(to_resonance_colored_graph(g, resonant)).label;
}

// Canonical SMILES with resonant (aromatic-like) systems in lowercase. Unset
// bonds of intermediate states are written as '~'.
inline CanonicalKey canonical_key(const MolGraph &g) {
  if (g.empty())
    return {};
  const auto resonant = resonant_bond_flags(g);
  const auto rank = canonical_ranks(g, resonant);
  return { internal::emit_smiles(g, rank, false, resonant) };
}

/* Dataset ingestion */

struct SmilesRecord {
  MolGraph graph;
  std::string smiles;
  std::size_t line = 0;
};

struct DatasetReport {
  std::vector<SmilesRecord> molecules;
  std::size_t malformed = 0;
  std::size_t out_of_limits = 0;
  std::vector<std::string> messages;
};

class DataError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// One SMILES per line; trailing whitespace-separated columns and '#' comment
// lines are ignored. Malformed lines are counted, or fatal in strict mode.
inline DatasetReport read_smiles_stream(std::istream &in, bool strict = false,
                                        const GraphLimits &limits = {}) {
  DatasetReport report;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok[0] == '#')
      continue;
    try {
      MolGraph g = parse_smiles(tok);
      if (auto err = validation_error(g, limits)) {
        ++report.out_of_limits;
        report.messages.push_back("line " + std::to_string(lineno) + ": "
                                  + *err);
        if (strict)
          throw DataError(report.messages.back());
        continue;
      }
      report.molecules.push_back({ std::move(g), tok, lineno });
    } catch (const SmilesError &e) {
      ++report.malformed;
      report.messages.push_back("line " + std::to_string(lineno) + ": "
                                + e.what());
      if (strict)
        throw DataError(report.messages.back());
    }
  }
  return report;
}

inline DatasetReport read_smiles_file(const std::string &path,
                                      bool strict = false,
                                      const GraphLimits &limits = {}) {
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open " + path);
  return read_smiles_stream(in, strict, limits);
}

}  // namespace agfn

#endif  // AGFN_SMILES_HPP_
