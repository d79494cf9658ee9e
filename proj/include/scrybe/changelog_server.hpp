// Copyright 2026 the Scrybe Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or
// at http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <httplib.h>

#include "scrybe/changelog.hpp"
#include "scrybe/config.hpp"
#include "scrybe/json_io.hpp"

namespace scrybe {

// HTTP front end for the changelog database. Bearer tokens map to two
// roles: authors may append, auditors may only read. The server sits
// behind the institutional firewall; tokens are the stand-in for its
// access control.

struct ChangelogServerConfig {
    std::string data_dir;
    KeyRegistry authors;
    std::string author_token;
    std::string auditor_token;
    HostPort listen{"127.0.0.1", 8001};
};

inline ChangelogServerConfig load_changelog_config(const std::string& path) {
    Config cfg = Config::load(path);
    ChangelogServerConfig out;
    out.data_dir = cfg.get("data_dir");
    out.authors = load_registry(cfg.get("authors"));
    out.author_token = cfg.get("token.author");
    out.auditor_token = cfg.get("token.auditor");
    out.listen = parse_host_port(cfg.get("listen"));
    return out;
}

class ChangelogServer {
  public:
    explicit ChangelogServer(ChangelogServerConfig cfg)
        : cfg_(std::move(cfg)), db_(cfg_.data_dir, cfg_.authors) {
        setup_routes();
    }

    ChangelogDatabase& db() { return db_; }
    httplib::Server& server() { return svr_; }

    /// Blocks until stop().
    bool listen() { return svr_.listen(cfg_.listen.host, cfg_.listen.port); }

    void stop() { svr_.stop(); }

  private:
    enum class Role { Author, Auditor };

    std::optional<Role> role_of(const httplib::Request& req) const {
        std::string auth = req.get_header_value("Authorization");
        const std::string prefix = "Bearer ";
        if (auth.rfind(prefix, 0) != 0) return std::nullopt;
        std::string token = auth.substr(prefix.size());
        if (!cfg_.author_token.empty() && token == cfg_.author_token) return Role::Author;
        if (!cfg_.auditor_token.empty() && token == cfg_.auditor_token) return Role::Auditor;
        return std::nullopt;
    }

    static void reply(httplib::Response& res, int status, const json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    bool require_role(const httplib::Request& req, httplib::Response& res, bool author_only) const {
        auto role = role_of(req);
        if (!role || (author_only && *role != Role::Author)) {
            reply(res, 401, json{{"error", "UNAUTHORIZED"}});
            return false;
        }
        return true;
    }

    void setup_routes() {
        svr_.Post("/entries", [this](const httplib::Request& req, httplib::Response& res) {
            if (!require_role(req, res, /*author_only=*/true)) return;
            ChangelogEntry entry;
            try {
                entry = entry_from_json(json::parse(req.body));
            } catch (const std::exception& e) {
                reply(res, 400, json{{"error", "BAD_REQUEST"}, {"detail", e.what()}});
                return;
            }
            AppendOutcome out = db_.append_entry(entry);
            if (out.ok) {
                reply(res, 200, json{{"entry_id", out.entry_id}});
            } else {
                int status = out.error == AppendError::IdGap ? 409 : 400;
                reply(res, status,
                      json{{"error", append_error_name(out.error)}, {"detail", out.detail}});
            }
        });

        svr_.Get("/entries", [this](const httplib::Request& req, httplib::Response& res) {
            if (!require_role(req, res, false)) return;
            json arr = json::array();
            for (const auto& e : db_.pull_all()) arr.push_back(to_json(e));
            reply(res, 200, arr);
        });

        svr_.Get(R"(/entries/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
            if (!require_role(req, res, false)) return;
            uint64_t id = 0;
            try {
                id = std::stoull(req.matches[1].str());
            } catch (const std::exception&) {
                reply(res, 404, json{{"error", "NOT_FOUND"}});
                return;
            }
            auto entry = db_.get_entry(id);
            if (!entry) {
                reply(res, 404, json{{"error", "NOT_FOUND"}});
                return;
            }
            reply(res, 200, to_json(*entry));
        });

        svr_.Get("/state", [this](const httplib::Request& req, httplib::Response& res) {
            if (!require_role(req, res, false)) return;
            reply(res, 200, to_json(db_.state()));
        });
    }

    ChangelogServerConfig cfg_;
    ChangelogDatabase db_;
    httplib::Server svr_;
};

}  // namespace scrybe
