#ifndef SHAPCRED_CHECKPOINT_HPP
#define SHAPCRED_CHECKPOINT_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "json.hpp"
#include "shapcred/agent_net.hpp"
#include "shapcred/config.hpp"
#include "shapcred/critic_net.hpp"
#include "shapcred/errors.hpp"
#include "shapcred/param_vector.hpp"
#include "shapcred/trainer.hpp"

namespace shapcred {

inline constexpr int checkpoint_format_version = 1;
inline constexpr const char* checkpoint_manifest_name = "manifest.json";
inline constexpr const char* checkpoint_payload_name = "params.bin";

/// Networks restored from disk together with the configuration that trained them.
struct Checkpoint {
   RunConfig config;
   std::size_t episode = 0;
   CriticNet critic;
   std::vector< AgentNet > agents;
};

namespace detail {

using nlohmann::json;

inline json segments_json(const ParamLayout& layout)
{
   json segs = json::array();
   for(const auto& s : layout.segments()) {
      segs.push_back({{"name", s.name}, {"offset", s.offset}, {"rows", s.rows}, {"cols", s.cols}});
   }
   return segs;
}

inline void check_segments(const json& segs, const ParamLayout& layout, const std::string& net)
{
   const auto& expect = layout.segments();
   if(! segs.is_array() || segs.size() != expect.size()) {
      throw ValidationError("checkpoint: segment count of '" + net + "' does not match its architecture");
   }
   for(std::size_t i = 0; i < expect.size(); ++i) {
      const auto& s = segs[i];
      if(s.at("name").get< std::string >() != expect[i].name || s.at("offset").get< std::size_t >() != expect[i].offset
         || s.at("rows").get< std::size_t >() != expect[i].rows || s.at("cols").get< std::size_t >() != expect[i].cols) {
         throw ValidationError("checkpoint: segment '" + expect[i].name + "' of '" + net + "' does not match");
      }
   }
}

inline std::uint64_t to_little(std::uint64_t v)
{
   if constexpr(std::endian::native == std::endian::big) {
      std::uint64_t r = 0;
      for(int b = 0; b < 8; ++b) {
         r = (r << 8) | ((v >> (8 * b)) & 0xffU);
      }
      return r;
   }
   return v;
}

inline void append_doubles(std::vector< char >& out, const Vec& v)
{
   for(Eigen::Index k = 0; k < v.size(); ++k) {
      const auto bits = to_little(std::bit_cast< std::uint64_t >(v[k]));
      char buf[8];
      std::memcpy(buf, &bits, 8);
      out.insert(out.end(), buf, buf + 8);
   }
}

inline void read_doubles(const std::vector< char >& in, std::size_t offset, Vec& v)
{
   for(Eigen::Index k = 0; k < v.size(); ++k) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, in.data() + 8 * (offset + static_cast< std::size_t >(k)), 8);
      v[k] = std::bit_cast< double >(to_little(bits));
   }
}

}  // namespace detail

/// Writes `dir`/manifest.json (format version, architectures, named segments,
/// configuration) and `dir`/params.bin (all parameters as little-endian
/// IEEE doubles: the critic, then agent 0, agent 1, ...).
inline void save_checkpoint(const std::filesystem::path& dir,
                            const RunConfig& config,
                            std::size_t episode,
                            const CriticNet& critic,
                            const std::vector< AgentNet >& agents)
{
   using detail::json;
   std::filesystem::create_directories(dir);
   std::vector< char > payload;
   json nets = json::array();
   std::size_t offset = 0;

   const auto& ca = critic.arch();
   nets.push_back({{"name", "critic"},
                   {"arch",
                    {{"n_agents", ca.n_agents},
                     {"obs_dim", ca.obs_dim},
                     {"n_actions", ca.n_actions},
                     {"groups", ca.groups},
                     {"units", ca.units},
                     {"head_hidden", ca.head_hidden}}},
                   {"offset", offset},
                   {"length", critic.params().size()},
                   {"segments", detail::segments_json(critic.params().layout())}});
   detail::append_doubles(payload, critic.params().data());
   offset += critic.params().size();

   for(std::size_t i = 0; i < agents.size(); ++i) {
      const auto& a = agents[i].arch();
      nets.push_back({{"name", "agent." + std::to_string(i)},
                      {"arch", {{"obs_dim", a.obs_dim}, {"hidden", a.hidden}, {"units", a.units}, {"n_actions", a.n_actions}}},
                      {"offset", offset},
                      {"length", agents[i].params().size()},
                      {"segments", detail::segments_json(agents[i].params().layout())}});
      detail::append_doubles(payload, agents[i].params().data());
      offset += agents[i].params().size();
   }

   json manifest = {{"format_version", checkpoint_format_version},
                    {"episode", episode},
                    {"payload", checkpoint_payload_name},
                    {"payload_doubles", offset},
                    {"byte_order", "little"},
                    {"config", serialize(config)},
                    {"networks", nets}};

   {
      std::ofstream out(dir / checkpoint_payload_name, std::ios::binary | std::ios::trunc);
      out.write(payload.data(), static_cast< std::streamsize >(payload.size()));
      if(! out) {
         throw std::runtime_error("checkpoint: cannot write " + (dir / checkpoint_payload_name).string());
      }
   }
   std::ofstream out(dir / checkpoint_manifest_name, std::ios::trunc);
   out << manifest.dump(2) << "\n";
   if(! out) {
      throw std::runtime_error("checkpoint: cannot write " + (dir / checkpoint_manifest_name).string());
   }
}

inline void save_checkpoint(const std::filesystem::path& dir, const RunConfig& config, const Trainer& t)
{
   save_checkpoint(dir, config, t.episodes_done(), t.critic(), t.agents());
}

/// Restores a checkpoint written by save_checkpoint. Refuses other format
/// versions and any manifest/payload inconsistency.
inline Checkpoint load_checkpoint(const std::filesystem::path& dir)
{
   using detail::json;
   std::ifstream min(dir / checkpoint_manifest_name);
   if(! min) {
      throw std::runtime_error("checkpoint: cannot open " + (dir / checkpoint_manifest_name).string());
   }
   json m;
   try {
      m = json::parse(min);
   } catch(const json::exception& e) {
      throw ValidationError(std::string("checkpoint: malformed manifest: ") + e.what());
   }

   try {
      const int version = m.at("format_version").get< int >();
      if(version != checkpoint_format_version) {
         throw ValidationError("checkpoint: format version " + std::to_string(version) + ", this build reads version "
                               + std::to_string(checkpoint_format_version));
      }
      if(m.at("byte_order").get< std::string >() != "little") {
         throw ValidationError("checkpoint: unsupported byte order");
      }

      std::ifstream pin(dir / m.at("payload").get< std::string >(), std::ios::binary);
      if(! pin) {
         throw std::runtime_error("checkpoint: cannot open payload in " + dir.string());
      }
      const std::vector< char > payload((std::istreambuf_iterator< char >(pin)), std::istreambuf_iterator< char >());
      const auto total = m.at("payload_doubles").get< std::size_t >();
      if(payload.size() != 8 * total) {
         throw ValidationError("checkpoint: payload holds " + std::to_string(payload.size()) + " bytes, manifest declares "
                               + std::to_string(8 * total));
      }

      const auto& nets = m.at("networks");
      if(! nets.is_array() || nets.empty() || nets[0].at("name") != "critic") {
         throw ValidationError("checkpoint: the first network must be the critic");
      }
      auto place = [&](const json& net, ParamVector& params) {
         const auto name = net.at("name").get< std::string >();
         detail::check_segments(net.at("segments"), params.layout(), name);
         const auto off = net.at("offset").get< std::size_t >();
         if(net.at("length").get< std::size_t >() != params.size() || off + params.size() > total) {
            throw ValidationError("checkpoint: '" + name + "' does not fit the payload");
         }
         detail::read_doubles(payload, off, params.data());
      };

      const auto& ja = nets[0].at("arch");
      CriticArch ca;
      ca.n_agents = ja.at("n_agents").get< std::size_t >();
      ca.obs_dim = ja.at("obs_dim").get< std::size_t >();
      ca.n_actions = ja.at("n_actions").get< std::size_t >();
      ca.groups = ja.at("groups").get< std::vector< std::string > >();
      ca.units = ja.at("units").get< std::size_t >();
      ca.head_hidden = ja.at("head_hidden").get< std::size_t >();
      Checkpoint cp{parse_config_string(m.at("config").get< std::string >()), m.at("episode").get< std::size_t >(),
                    CriticNet(ca), {}};
      place(nets[0], cp.critic.params());

      for(std::size_t k = 1; k < nets.size(); ++k) {
         const auto& a = nets[k].at("arch");
         if(nets[k].at("name").get< std::string >() != "agent." + std::to_string(k - 1)) {
            throw ValidationError("checkpoint: agents must follow the critic in order");
         }
         cp.agents.emplace_back(AgentArch{a.at("obs_dim").get< std::size_t >(), a.at("hidden").get< std::size_t >(),
                                          a.at("units").get< std::size_t >(), a.at("n_actions").get< std::size_t >()});
         place(nets[k], cp.agents.back().params());
      }
      if(cp.agents.size() != ca.n_agents) {
         throw ValidationError("checkpoint: critic covers " + std::to_string(ca.n_agents) + " agents, manifest lists "
                               + std::to_string(cp.agents.size()));
      }
      return cp;
   } catch(const json::exception& e) {
      throw ValidationError(std::string("checkpoint: malformed manifest: ") + e.what());
   }
}

}  // namespace shapcred

#endif  // SHAPCRED_CHECKPOINT_HPP
