#include "anbp/search.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace anbp {

namespace {

constexpr const char* kIntruderActor = "INTRUDER";

struct CompiledStep {
  int action = 0;
  bool is_send = true;
};

struct Instance {
  std::string role;
  int session = 0;
  std::vector<CompiledStep> steps;
  int pc = 0;
  Substitution binds;
  std::vector<bool> witnessed;  // per goal, emitted once
  std::vector<bool> requested;

  bool done() const { return pc >= static_cast<int>(steps.size()); }
  std::string actor() const { return role + "@" + std::to_string(session); }
};

struct SentMsg {
  int session = 0;
  int action = 0;
  Term msg;
};

struct EventRec {
  int goal = 0;
  bool witness = false;
  Term value;
  bool peer_honest = true;
  int session = 0;
};

struct State {
  std::vector<Instance> instances;
  Knowledge intruder;  // kept analyzed
  std::vector<SentMsg> sent;
  std::vector<EventRec> events;
  std::vector<TraceStep> path;
};

struct Transition {
  int inst = 0;
  bool is_send = true;
  // delivery payload
  Term msg = Term::constant("");
  bool from_intruder = false;
  std::string origin_actor;  // producer of a delivered message
};

struct SubResult {
  std::vector<std::optional<AttackTrace>> attacks;
  long states = 0;
  bool exhausted = false;
};

class Engine {
 public:
  Engine(const ProtocolSpec& spec, const SearchConfig& cfg, const StateObserver& observer)
      : spec_(spec), cfg_(cfg), observer_(observer) {
    if (cfg_.sessions < 1 || cfg_.sessions > 2)
      throw ModelError("sessions must be 1 or 2");
    if (cfg_.max_states <= 0) throw ModelError("max_states must be positive");
    if (cfg_.intruder_roles) {
      corrupt_ = *cfg_.intruder_roles;
      for (const std::string& r : corrupt_)
        if (!spec_.is_role(r)) throw ModelError("unknown intruder role '" + r + "'");
    } else if (!spec_.roles.empty()) {
      corrupt_.insert(spec_.roles.front());
    }
    fresh_ = freshness(spec_);
    mints_.resize(spec_.actions.size());
    for (const auto& [label, info] : fresh_)
      if (info.first_action >= 0) mints_[info.first_action].push_back(label);
    for (auto& m : mints_) std::sort(m.begin(), m.end());
  }

  bool is_corrupt(const std::string& role) const { return corrupt_.count(role) != 0; }
  const std::set<std::string>& corrupt() const { return corrupt_; }

  // Does any fresh value inside this template originate from a corrupted
  // role?
  bool intruder_originates(const Term& t) const {
    for (const Term& sub : subterms(t)) {
      if (!sub.is(TermKind::Variable)) continue;
      auto it = fresh_.find(sub.label());
      if (it != fresh_.end() && is_corrupt(it->second.minted_by)) return true;
    }
    return false;
  }

  std::string sort_of(const std::string& label) const {
    auto it = spec_.sorts.find(label);
    return it == spec_.sorts.end() ? "" : it->second;
  }

  State initial_state() const {
    State st;
    for (int s = 0; s < cfg_.sessions; ++s) {
      for (const std::string& role : spec_.roles) {
        if (is_corrupt(role)) continue;
        Instance inst;
        inst.role = role;
        inst.session = s;
        for (size_t a = 0; a < spec_.actions.size(); ++a) {
          const ActionStep& act = spec_.actions[a];
          if (act.sender == role) inst.steps.push_back({static_cast<int>(a), true});
          if (act.receiver == role) inst.steps.push_back({static_cast<int>(a), false});
        }
        inst.witnessed.assign(spec_.goals.size(), false);
        inst.requested.assign(spec_.goals.size(), false);
        auto it = spec_.knowledge.find(role);
        if (it != spec_.knowledge.end()) {
          for (const Term& t : it->second)
            for (const Term& sub : subterms(t))
              if (sub.is(TermKind::Variable) && sub.sort() == "Agent")
                inst.binds.bind(sub, Term::agent(sub.label()));
        }
        st.instances.push_back(std::move(inst));
      }
    }
    st.intruder = intruder_initial_knowledge();
    return st;
  }

  Knowledge intruder_initial_knowledge() const {
    Knowledge k;
    for (const std::string& role : corrupt_) {
      auto it = spec_.knowledge.find(role);
      if (it == spec_.knowledge.end()) continue;
      for (const Term& t : it->second) {
        if (t.is_atom() && t.sort() == "Function") {
          for (const FunctionSymbol& fn : spec_.functions)
            if (fn.label == t.label()) k.add_function(fn);
          continue;
        }
        Substitution cast;
        for (const Term& sub : subterms(t))
          if (sub.is(TermKind::Variable) && sub.sort() == "Agent")
            cast.bind(sub, Term::agent(sub.label()));
        Term ground = cast.apply(t);
        if (ground.is_ground()) k.add(ground);
      }
      // The intruder generates its own fresh values for every value the role
      // it plays would mint, including its own key pairs.
      for (const auto& [label, info] : fresh_) {
        if (info.minted_by != role) continue;
        for (int s = 0; s < cfg_.sessions; ++s) {
          Term f = Term::fresh("i_" + label, s, sort_of(label));
          k.add(f);
          if (sort_of(label) == "PublicKey") k.add(Term::private_key_of(f));
        }
      }
    }
    return analyze(k);
  }

  // -- events and goal checks ------------------------------------------------

  void emit_events(State& st, size_t inst_idx) const {
    Instance& inst = st.instances[inst_idx];
    for (size_t gi = 0; gi < spec_.goals.size(); ++gi) {
      const Goal& g = spec_.goals[gi];
      if (g.kind == Goal::Kind::Secrecy) continue;
      if (inst.role == g.peer && !inst.witnessed[gi]) {
        Term v = inst.binds.apply(g.payload);
        if (v.is_ground()) {
          st.events.push_back({static_cast<int>(gi), true, v, true, inst.session});
          inst.witnessed[gi] = true;
        }
      }
      if (inst.role == g.authenticator && !inst.requested[gi]) {
        Term v = inst.binds.apply(g.payload);
        if (v.is_ground()) {
          st.events.push_back(
              {static_cast<int>(gi), false, v, !is_corrupt(g.peer), inst.session});
          inst.requested[gi] = true;
        }
      }
    }
  }

  bool goal_violated(const State& st, size_t gi) const {
    const Goal& g = spec_.goals[gi];
    switch (g.kind) {
      case Goal::Kind::WeakAuth: {
        for (const EventRec& e : st.events) {
          if (e.goal != static_cast<int>(gi) || e.witness || !e.peer_honest) continue;
          bool matched = false;
          for (const EventRec& w : st.events)
            if (w.goal == static_cast<int>(gi) && w.witness && w.value == e.value) {
              matched = true;
              break;
            }
          if (!matched) return true;
        }
        return false;
      }
      case Goal::Kind::StrongAuth: {
        std::map<Term, int> requests, witnesses;
        for (const EventRec& e : st.events) {
          if (e.goal != static_cast<int>(gi)) continue;
          if (e.witness)
            witnesses[e.value]++;
          else if (e.peer_honest)
            requests[e.value]++;
        }
        for (const auto& [v, n] : requests) {
          auto it = witnesses.find(v);
          if (it == witnesses.end() || it->second < n) return true;
        }
        return false;
      }
      case Goal::Kind::Secrecy: {
        bool member_corrupt = false;
        for (const std::string& r : g.among)
          if (is_corrupt(r)) member_corrupt = true;
        std::vector<Term> components =
            g.payload.is(TermKind::Pair) ? g.payload.flatten() : std::vector<Term>{g.payload};
        for (int s = 0; s < cfg_.sessions; ++s) {
          for (const Term& c : components) {
            // Values the dishonest member itself originates carry no
            // agreement obligation: an attacker can always quote different
            // own-values to different parties. The goal protects values
            // honest participants originate.
            if (intruder_originates(c)) continue;
            std::optional<Term> seen;
            for (const Instance& inst : st.instances) {
              if (inst.session != s) continue;
              if (std::find(g.among.begin(), g.among.end(), inst.role) == g.among.end())
                continue;
              Term v = inst.binds.apply(c);
              if (!v.is_ground()) continue;
              if (seen && !(*seen == v)) return true;  // agreement broken
              seen = v;
              // A secret held only among honest parties must stay out of the
              // intruder's reach; with a dishonest member derivability is
              // legitimate and only the agreement reading applies.
              if (!member_corrupt && derives(st.intruder, v)) return true;
            }
          }
        }
        return false;
      }
    }
    return false;
  }

  // -- transition generation -------------------------------------------------

  bool injection_allowed(const ActionStep& act) const {
    if (!act.channel.authentic) return true;  // insecure or confidential-only
    return is_corrupt(act.sender);  // authentic endpoint owned by the intruder
  }

  bool delivery_compatible(const ActionStep& sent_act, int sent_session,
                           const ActionStep& recv_act, int recv_session) const {
    if (!(sent_act.channel == recv_act.channel)) return false;
    if (recv_act.channel.authentic) {
      if (sent_act.sender != recv_act.sender) return false;
      if (recv_act.sender_pseudonym) {
        // Pseudonymous handles are session-scoped, like an open TLS channel.
        if (sent_act.sender_pseudonym != recv_act.sender_pseudonym) return false;
        if (sent_session != recv_session) return false;
      }
    }
    if (recv_act.channel.confidential) {
      if (sent_act.receiver != recv_act.receiver) return false;
      if (recv_act.receiver_pseudonym &&
          (sent_act.receiver_pseudonym != recv_act.receiver_pseudonym ||
           sent_session != recv_session))
        return false;
    }
    return true;
  }

  std::vector<Transition> gen_transitions(const State& st, bool* truncated) const {
    std::vector<Transition> out;
    // Honest sends first.
    for (size_t i = 0; i < st.instances.size(); ++i) {
      const Instance& inst = st.instances[i];
      if (inst.done() || !inst.steps[inst.pc].is_send) continue;
      Transition t;
      t.inst = static_cast<int>(i);
      t.is_send = true;
      out.push_back(std::move(t));
    }
    // Honest deliveries.
    std::map<size_t, std::set<Term>> offered;
    for (size_t i = 0; i < st.instances.size(); ++i) {
      const Instance& inst = st.instances[i];
      if (inst.done() || inst.steps[inst.pc].is_send) continue;
      const ActionStep& act = spec_.actions[inst.steps[inst.pc].action];
      Term pattern = inst.binds.apply(act.message);
      for (const SentMsg& sm : st.sent) {
        const ActionStep& sact = spec_.actions[sm.action];
        if (!delivery_compatible(sact, sm.session, act, inst.session)) continue;
        if (!match(pattern, sm.msg)) continue;
        if (!offered[i].insert(sm.msg).second) continue;
        Transition t;
        t.inst = static_cast<int>(i);
        t.is_send = false;
        t.msg = sm.msg;
        t.from_intruder = false;
        t.origin_actor = sact.sender + "@" + std::to_string(sm.session);
        out.push_back(std::move(t));
      }
    }
    // Intruder injections last.
    for (size_t i = 0; i < st.instances.size(); ++i) {
      const Instance& inst = st.instances[i];
      if (inst.done() || inst.steps[inst.pc].is_send) continue;
      const ActionStep& act = spec_.actions[inst.steps[inst.pc].action];
      if (!injection_allowed(act)) continue;
      Term pattern = inst.binds.apply(act.message);
      size_t generated = 0;
      instantiate_each(st.intruder, pattern, cfg_.intruder_depth,
                       [&](const Substitution& s) {
                         Term msg = s.apply(pattern);
                         if (!offered[i].insert(msg).second) return true;
                         Transition t;
                         t.inst = static_cast<int>(i);
                         t.is_send = false;
                         t.msg = std::move(msg);
                         t.from_intruder = true;
                         t.origin_actor = kIntruderActor;
                         out.push_back(std::move(t));
                         if (++generated > kMaxInjectionsPerStep) {
                           *truncated = true;
                           return false;
                         }
                         return true;
                       });
    }
    return out;
  }

  // Applies a transition; returns false when it does not apply (only
  // possible during replay of a tampered trace).
  bool apply_transition(State& st, const Transition& t) {
    Instance& inst = st.instances[t.inst];
    const CompiledStep& step = inst.steps[inst.pc];
    const ActionStep& act = spec_.actions[step.action];
    TraceStep ts;
    ts.index = static_cast<int>(st.path.size());
    ts.session = inst.session;
    ts.action_index = step.action;
    ts.channel = act.channel;
    ts.span = act.span;
    if (t.is_send) {
      for (const std::string& label : mints_[step.action]) {
        if (fresh_.at(label).minted_by != inst.role) continue;
        Term var = Term::variable(label, sort_of(label));
        if (inst.binds.lookup(label)) continue;
        inst.binds.bind(var, Term::fresh(label, inst.session, sort_of(label)));
      }
      Term msg = inst.binds.apply(act.message);
      if (!msg.is_ground()) return false;
      st.sent.push_back({inst.session, step.action, msg});
      if (!act.channel.confidential || is_corrupt(act.receiver))
        st.intruder = analyze_with(st.intruder, msg);
      note_pseudonym(act.sender_pseudonym, inst.session, inst.actor());
      ts.is_send = true;
      ts.from_intruder = false;
      ts.actor = inst.actor();
      ts.message = msg;
    } else {
      auto m = match(act.message, t.msg, inst.binds);
      if (!m) return false;
      inst.binds = *m;
      if (t.from_intruder)
        note_pseudonym(act.sender_pseudonym, inst.session, kIntruderActor);
      ts.is_send = false;
      ts.from_intruder = t.from_intruder;
      ts.actor = t.origin_actor;
      ts.message = t.msg;
    }
    inst.pc++;
    st.path.push_back(std::move(ts));
    emit_events(st, static_cast<size_t>(t.inst));
    return true;
  }

  static Knowledge analyze_with(const Knowledge& k, const Term& msg) {
    Knowledge next = k;
    next.add(msg);
    return analyze(next);
  }

  void note_pseudonym(const std::optional<std::string>& label, int session,
                      const std::string& owner) {
    if (!label) return;
    std::lock_guard<std::mutex> guard(pseudonym_mutex_);
    auto key = std::make_pair(*label, session);
    auto [it, fresh] = pseudonym_owner_.emplace(key, owner);
    if (!fresh && it->second != owner) pseudonym_invariant_ = false;
  }

  // -- bounded search ----------------------------------------------------------

  SubResult search_from(State root, long budget, bool check_root) {
    SubResult res;
    res.attacks.assign(spec_.goals.size(), std::nullopt);
    std::vector<bool> violable(spec_.goals.size(), true);
    for (size_t gi = 0; gi < spec_.goals.size(); ++gi) {
      const Goal& g = spec_.goals[gi];
      if (g.kind != Goal::Kind::Secrecy)
        violable[gi] = !is_corrupt(g.peer) && !is_corrupt(g.authenticator);
    }
    auto all_resolved = [&] {
      for (size_t gi = 0; gi < spec_.goals.size(); ++gi)
        if (violable[gi] && !res.attacks[gi]) return false;
      return true;
    };
    int max_len = 0;
    for (const Instance& inst : root.instances) max_len += static_cast<int>(inst.steps.size());

    if (check_root) record_violations(root, res);

    bool space_truncated = true;
    for (int limit = 1; limit <= max_len && space_truncated && !res.exhausted; ++limit) {
      if (all_resolved()) break;
      space_truncated = false;
      dfs(root, limit, budget, res, space_truncated, all_resolved);
    }
    return res;
  }

  void record_violations(const State& st, SubResult& res) const {
    for (size_t gi = 0; gi < spec_.goals.size(); ++gi) {
      if (res.attacks[gi]) continue;
      if (!goal_violated(st, gi)) continue;
      AttackTrace at;
      at.goal = spec_.goals[gi];
      at.goal_index = static_cast<int>(gi);
      at.sessions = cfg_.sessions;
      at.intruder_roles = corrupt_;
      at.steps = st.path;
      res.attacks[gi] = std::move(at);
    }
  }

  void dfs(const State& st, int depth_left, long budget, SubResult& res,
           bool& space_truncated, const std::function<bool()>& all_resolved) {
    if (all_resolved() || res.exhausted) return;
    if (depth_left == 0) {
      space_truncated = true;
      return;
    }
    bool inj_truncated = false;
    std::vector<Transition> ts = gen_transitions(st, &inj_truncated);
    if (inj_truncated) res.exhausted = true;
    for (const Transition& t : ts) {
      if (all_resolved() || res.exhausted) return;
      State ns = st;
      bool ok = apply_transition(ns, t);
      assert(ok);
      (void)ok;
      if (++res.states > budget) {
        res.exhausted = true;
        return;
      }
      if (observer_) observer_(ns.intruder);
      record_violations(ns, res);
      dfs(ns, depth_left - 1, budget, res, space_truncated, all_resolved);
    }
  }

  CheckResult run() {
    State init = initial_state();
    std::vector<SubResult> parts;

    bool unused = false;
    std::vector<Transition> roots = gen_transitions(init, &unused);
    int nworkers = std::max(1, cfg_.workers);
    if (nworkers <= 1 || roots.size() <= 1) {
      parts.push_back(search_from(init, cfg_.max_states, false));
    } else {
      // Deterministic parallel split over the first branching level; each
      // subtree gets an equal budget slice and the in-order merge below
      // keeps the verdict identical for any worker count.
      parts.resize(roots.size());
      long slice = std::max<long>(1, cfg_.max_states / static_cast<long>(roots.size()));
      std::atomic<size_t> next{0};
      auto worker = [&] {
        for (;;) {
          size_t i = next.fetch_add(1);
          if (i >= roots.size()) return;
          State sub = init;
          bool ok = apply_transition(sub, roots[i]);
          assert(ok);
          (void)ok;
          parts[i] = search_from(std::move(sub), slice, true);
        }
      };
      std::vector<std::thread> pool;
      for (int w = 0; w < std::min<int>(nworkers, static_cast<int>(roots.size())); ++w)
        pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    CheckResult out;
    out.per_goal.resize(spec_.goals.size());
    std::vector<std::optional<AttackTrace>> best(spec_.goals.size());
    for (const SubResult& part : parts) {
      out.states_explored += part.states;
      out.budget_exhausted = out.budget_exhausted || part.exhausted;
      for (size_t gi = 0; gi < spec_.goals.size(); ++gi) {
        if (!part.attacks[gi]) continue;
        if (!best[gi] || part.attacks[gi]->steps.size() < best[gi]->steps.size())
          best[gi] = part.attacks[gi];
      }
    }
    for (size_t gi = 0; gi < spec_.goals.size(); ++gi) {
      GoalVerdict& gv = out.per_goal[gi];
      gv.goal = spec_.goals[gi];
      gv.verdict.bound = cfg_;
      gv.verdict.states_explored = out.states_explored;
      if (best[gi]) {
        gv.verdict.kind = Verdict::Kind::Attack;
        gv.verdict.trace = best[gi];
      } else if (out.budget_exhausted) {
        gv.verdict.kind = Verdict::Kind::Inconclusive;
      } else {
        gv.verdict.kind = Verdict::Kind::Safe;
      }
    }
    out.pseudonym_invariant_held = pseudonym_invariant_;
    return out;
  }

  // -- replay ------------------------------------------------------------------

  Verdict replay_trace(const AttackTrace& trace) {
    if (trace.steps.empty()) throw ReplayError("no violation reached", -1);
    State st = initial_state();
    for (size_t i = 0; i < trace.steps.size(); ++i) {
      const TraceStep& ts = trace.steps[i];
      int idx = static_cast<int>(i);
      if (ts.action_index < 0 || ts.action_index >= static_cast<int>(spec_.actions.size()))
        throw ReplayError("step references an unknown action", idx);
      const ActionStep& act = spec_.actions[ts.action_index];
      Transition t;
      t.is_send = ts.is_send;
      t.msg = ts.message;
      t.from_intruder = ts.from_intruder;
      t.origin_actor = ts.actor;
      const std::string wanted_role = ts.is_send ? act.sender : act.receiver;
      int found = -1;
      for (size_t k = 0; k < st.instances.size(); ++k) {
        const Instance& inst = st.instances[k];
        if (inst.role == wanted_role && inst.session == ts.session) found = static_cast<int>(k);
      }
      if (found < 0) throw ReplayError("no honest instance for step actor", idx);
      const Instance& inst = st.instances[found];
      if (inst.done() || inst.steps[inst.pc].action != ts.action_index ||
          inst.steps[inst.pc].is_send != ts.is_send)
        throw ReplayError("step out of protocol order", idx);
      t.inst = found;
      if (!ts.is_send) {
        if (ts.from_intruder) {
          if (!injection_allowed(act))
            throw ReplayError("intruder cannot speak on this channel", idx);
          if (!derives(st.intruder, ts.message))
            throw ReplayError("intruder-sent message is not derivable here", idx);
        } else {
          bool seen = false;
          for (const SentMsg& sm : st.sent)
            if (sm.msg == ts.message &&
                delivery_compatible(spec_.actions[sm.action], sm.session, act, ts.session))
              seen = true;
          if (!seen) throw ReplayError("delivered message was never sent", idx);
        }
      }
      if (!apply_transition(st, t)) throw ReplayError("message does not match the pattern", idx);
      if (ts.is_send && !(st.path.back().message == ts.message))
        throw ReplayError("recomputed message differs from the trace", idx);
    }
    if (trace.goal_index < 0 || trace.goal_index >= static_cast<int>(spec_.goals.size()))
      throw ReplayError("trace names an unknown goal", -1);
    if (!goal_violated(st, static_cast<size_t>(trace.goal_index)))
      throw ReplayError("trace does not reach a violation of its goal", -1);
    Verdict v;
    v.kind = Verdict::Kind::Attack;
    v.bound = cfg_;
    v.states_explored = static_cast<long>(trace.steps.size());
    v.trace = trace;
    return v;
  }

 private:
  static constexpr size_t kMaxInjectionsPerStep = 50000;

  const ProtocolSpec& spec_;
  SearchConfig cfg_;
  StateObserver observer_;
  std::set<std::string> corrupt_;
  std::map<std::string, FreshInfo> fresh_;
  std::vector<std::vector<std::string>> mints_;
  std::mutex pseudonym_mutex_;
  std::map<std::pair<std::string, int>, std::string> pseudonym_owner_;
  bool pseudonym_invariant_ = true;
};

}  // namespace

bool CheckResult::any_attack() const {
  return std::any_of(per_goal.begin(), per_goal.end(),
                     [](const GoalVerdict& g) { return g.verdict.attack(); });
}

bool CheckResult::any_inconclusive() const {
  return std::any_of(per_goal.begin(), per_goal.end(), [](const GoalVerdict& g) {
    return g.verdict.kind == Verdict::Kind::Inconclusive;
  });
}

const AttackTrace* CheckResult::first_attack() const {
  const AttackTrace* best = nullptr;
  for (const GoalVerdict& g : per_goal) {
    if (!g.verdict.attack()) continue;
    if (!best || g.verdict.trace->steps.size() < best->steps.size())
      best = &*g.verdict.trace;
  }
  return best;
}

CheckResult check_goals(const ProtocolSpec& spec0, const SearchConfig& cfg,
                        const StateObserver& observer) {
  ProtocolSpec spec = spec0.definitions.empty() ? spec0 : expand(spec0);
  Engine engine(spec, cfg, observer);
  return engine.run();
}

Verdict check(const ProtocolSpec& spec, const SearchConfig& cfg) {
  CheckResult res = check_goals(spec, cfg);
  Verdict v;
  v.bound = cfg;
  v.states_explored = res.states_explored;
  if (const AttackTrace* at = res.first_attack()) {
    v.kind = Verdict::Kind::Attack;
    v.trace = *at;
  } else if (res.budget_exhausted) {
    v.kind = Verdict::Kind::Inconclusive;
  } else {
    v.kind = Verdict::Kind::Safe;
  }
  return v;
}

Verdict replay(const ProtocolSpec& spec0, const AttackTrace& trace) {
  ProtocolSpec spec = spec0.definitions.empty() ? spec0 : expand(spec0);
  SearchConfig cfg;
  cfg.sessions = trace.sessions;
  cfg.intruder_roles = trace.intruder_roles;
  Engine engine(spec, cfg, {});
  return engine.replay_trace(trace);
}

// ---------------------------------------------------------------------------
// Trace serialization

std::string serialize_trace(const AttackTrace& trace) {
  std::ostringstream os;
  os << "attack goal=" << trace.goal_index << " sessions=" << trace.sessions << " corrupt=";
  if (trace.intruder_roles.empty()) {
    os << "none";
  } else {
    bool sep = false;
    for (const std::string& r : trace.intruder_roles) {
      if (sep) os << ',';
      os << r;
      sep = true;
    }
  }
  os << " # " << trace.goal.to_string() << "\n";
  for (const TraceStep& s : trace.steps) {
    os << s.index << ' ' << s.actor << ' ' << (s.is_send ? "send" : "recv") << ' '
       << s.channel.token() << " s" << s.session << " a" << s.action_index << " @"
       << s.span.to_string() << ' ' << s.message.to_string() << "\n";
  }
  return os.str();
}

namespace {

SymbolResolver make_spec_resolver(const ProtocolSpec& spec) {
  auto sorts = std::make_shared<std::map<std::string, std::string>>(spec.sorts);
  return [sorts](const std::string& label, int session) -> Term {
    std::string base = label;
    if (base.rfind("i_", 0) == 0) base = base.substr(2);
    auto it = sorts->find(base);
    std::string sort = it == sorts->end() ? "" : it->second;
    if (session >= 0) return Term::fresh(label, session, sort);
    if (sort == "Agent") return Term::agent(label);
    return Term::constant(label, sort);
  };
}

}  // namespace

AttackTrace parse_trace(std::string_view text, const ProtocolSpec& spec0) {
  ProtocolSpec spec = spec0.definitions.empty() ? spec0 : expand(spec0);
  SymbolResolver resolver = make_spec_resolver(spec);
  AttackTrace out;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (!header_seen) {
      std::string word;
      ls >> word;
      if (word != "attack") throw ReplayError("trace header missing", -1);
      std::string field;
      while (ls >> field) {
        if (field == "#") break;
        auto eq = field.find('=');
        if (eq == std::string::npos) continue;
        std::string key = field.substr(0, eq);
        std::string val = field.substr(eq + 1);
        if (key == "goal") out.goal_index = std::stoi(val);
        if (key == "sessions") out.sessions = std::stoi(val);
        if (key == "corrupt" && val != "none") {
          std::istringstream cs(val);
          std::string r;
          while (std::getline(cs, r, ',')) out.intruder_roles.insert(r);
        }
      }
      if (out.goal_index < 0 || out.goal_index >= static_cast<int>(spec.goals.size()))
        throw ReplayError("trace names an unknown goal", -1);
      out.goal = spec.goals[out.goal_index];
      header_seen = true;
      continue;
    }
    TraceStep ts;
    std::string dir, chan, sess, act, span;
    ls >> ts.index >> ts.actor >> dir >> chan >> sess >> act >> span;
    if (!ls) throw ReplayError("malformed trace step", static_cast<int>(out.steps.size()));
    ts.is_send = dir == "send";
    ts.from_intruder = ts.actor == kIntruderActor;
    auto ck = ChannelKind::from_token(chan);
    if (!ck || sess.size() < 2 || sess[0] != 's' || act.size() < 2 || act[0] != 'a' ||
        span.size() < 2 || span[0] != '@')
      throw ReplayError("malformed trace step", static_cast<int>(out.steps.size()));
    ts.channel = *ck;
    ts.session = std::stoi(sess.substr(1));
    ts.action_index = std::stoi(act.substr(1));
    {
      std::istringstream sp(span.substr(1));
      char colon;
      sp >> ts.span.line >> colon >> ts.span.column >> colon >> ts.span.length;
    }
    std::string term_text;
    std::getline(ls, term_text);
    ts.message = parse_term(term_text, resolver);
    out.steps.push_back(std::move(ts));
  }
  if (!header_seen) throw ReplayError("empty trace", -1);
  return out;
}

}  // namespace anbp
