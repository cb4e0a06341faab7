#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "starlock/ballot.hpp"
#include "starlock/trustees.hpp"

namespace starlock {

// Everything published before polls open. The params file is the JSON form
// of this struct; the board header embeds it verbatim.
struct ElectionParams {
  std::string election_id;
  std::string office_id;
  GroupParams group;
  JointPublicKey joint_key;
  BigInt office_pk;
  std::vector<BallotStyle> styles;
  std::vector<std::string> terminals;
  std::string salt_hex;  // public random salt mixed into every z_0

  const BallotStyle& style(const std::string& id) const {
    for (const auto& s : styles)
      if (s.style_id == id) return s;
    throw UnknownOption("no ballot style '" + id + "'");
  }

  bool has_terminal(const std::string& id) const {
    for (const auto& t : terminals)
      if (t == id) return true;
    return false;
  }

  // Hash over all election parameters, in canonical encoding.
  Digest digest() const {
    CanonicalWriter w;
    w.field("starlock/election-params/v1").field(election_id).field(office_id);
    CanonicalWriter g, jk, st, te;
    group.write(g);
    joint_key.write(jk);
    for (const auto& s : styles) st.nested(canonical(s));
    for (const auto& t : terminals) te.field(t);
    w.nested(g).nested(jk).field(office_pk).nested(st).nested(te).field(salt_hex);
    return w.digest();
  }

  // Seed of terminal m's hash chain.
  Digest z0(const std::string& terminal_id) const {
    CanonicalWriter w;
    w.field("starlock/z0/v1").field(digest()).field(salt_hex).field(election_id).field(office_id).field(terminal_id);
    return w.digest();
  }

  // Every distinct contest across styles, in first-appearance order. A
  // contest shared by several styles must be defined identically in each,
  // since the tally aggregates by contest id.
  std::vector<Contest> contest_catalog() const {
    std::vector<Contest> out;
    for (const auto& s : styles)
      for (const auto& c : s.contests) {
        bool seen = false;
        for (const auto& o : out)
          if (o.contest_id == c.contest_id) {
            if (!(o == c)) throw InvalidArgument("contest '" + c.contest_id + "' differs between styles");
            seen = true;
          }
        if (!seen) out.push_back(c);
      }
    return out;
  }

  void validate() const {
    group.validate();
    joint_key.validate(group);
    if (!group.is_element(office_pk)) throw InvalidArgument("office key not in subgroup");
    for (const auto& s : styles) s.validate();
    contest_catalog();
    if (election_id.empty()) throw InvalidArgument("empty election id");
  }
};

inline nlohmann::json to_json(const ElectionParams& p) {
  nlohmann::json styles = nlohmann::json::array();
  for (const auto& s : p.styles) styles.push_back(to_json(s));
  return {{"election_id", p.election_id},
          {"office_id", p.office_id},
          {"group", to_json(p.group)},
          {"joint_key", to_json(p.joint_key, p.group)},
          {"office_pk", to_hex(p.office_pk)},
          {"styles", styles},
          {"terminals", p.terminals},
          {"salt", p.salt_hex}};
}

inline ElectionParams election_params_from_json(const nlohmann::json& j) {
  try {
    ElectionParams p;
    p.election_id = j.at("election_id").get<std::string>();
    p.office_id = j.at("office_id").get<std::string>();
    p.group = group_from_json(j.at("group"));
    p.joint_key = joint_key_from_json(j.at("joint_key"));
    p.office_pk = from_hex(j.at("office_pk").get<std::string>());
    for (const auto& s : j.at("styles")) p.styles.push_back(ballot_style_from_json(s));
    p.terminals = j.at("terminals").get<std::vector<std::string>>();
    p.salt_hex = j.at("salt").get<std::string>();
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("election params: ") + e.what());
  }
}

// Everything keygen plus election setup produces: public params and the
// secrets that stay with trustees and the election office.
struct ElectionSetup {
  ElectionParams params;
  std::vector<TrusteeShare> shares;
  Keypair office;
};

inline ElectionSetup make_election(std::string election_id, std::vector<BallotStyle> styles,
                                   std::vector<std::string> terminals, std::uint32_t n, std::uint32_t k,
                                   const GroupParams& gp, Rng& rng) {
  ElectionSetup out;
  auto [jpk, shares] = dkg(n, k, gp, rng);
  out.office = Keypair::generate(gp, rng);
  out.shares = std::move(shares);
  ElectionParams& p = out.params;
  p.election_id = std::move(election_id);
  p.office_id = "office";
  p.group = gp;
  p.joint_key = std::move(jpk);
  p.office_pk = out.office.pk;
  p.styles = std::move(styles);
  p.terminals = std::move(terminals);
  p.salt_hex = hex(rng.bytes(16));
  p.validate();
  return out;
}

}  // namespace starlock
