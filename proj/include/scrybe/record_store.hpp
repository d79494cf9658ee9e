// Copyright 2026 the Scrybe Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or
// at http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <cstdio>
#include <mutex>

#include <httplib.h>

#include "scrybe/config.hpp"
#include "scrybe/json_io.hpp"

namespace scrybe {

// Stand-in for the institutional record database: a keyed store behind an
// HTTP POST import/export API with bearer-token auth. The backdoor endpoint
// writes fields without any changelog entry, which is exactly the
// out-of-band tampering the audit's store comparison has to catch; it only
// exists when the config enables it.

struct RecordStoreConfig {
    std::string data_file;
    std::string token;
    bool enable_backdoor = false;
    HostPort listen{"127.0.0.1", 8002};
};

inline RecordStoreConfig load_store_config(const std::string& path) {
    Config cfg = Config::load(path);
    RecordStoreConfig out;
    out.data_file = cfg.get("data_file");
    out.token = cfg.get("token");
    out.enable_backdoor = cfg.get_bool_or("enable_backdoor", false);
    out.listen = parse_host_port(cfg.get("listen"));
    return out;
}

class RecordStoreService {
  public:
    explicit RecordStoreService(RecordStoreConfig cfg) : cfg_(std::move(cfg)) {
        load();
        setup_routes();
    }

    bool listen() { return svr_.listen(cfg_.listen.host, cfg_.listen.port); }
    void stop() { svr_.stop(); }
    httplib::Server& server() { return svr_; }

    RecordStoreState snapshot() const {
        std::lock_guard lock(mu_);
        return state_;
    }

  private:
    void load() {
        std::ifstream in(cfg_.data_file);
        if (!in) return;  // first start
        json j;
        in >> j;
        state_ = record_state_from_json(j);
    }

    /// Full rewrite through a temp file; rename keeps the file atomic under
    /// crashes.
    void persist_locked() {
        std::string tmp = cfg_.data_file + ".tmp";
        write_file(tmp, to_json(state_).dump(2) + "\n");
        if (std::rename(tmp.c_str(), cfg_.data_file.c_str()) != 0)
            throw std::runtime_error("cannot replace " + cfg_.data_file);
    }

    bool authorized(const httplib::Request& req) const {
        std::string auth = req.get_header_value("Authorization");
        const std::string prefix = "Bearer ";
        return auth.rfind(prefix, 0) == 0 && auth.substr(prefix.size()) == cfg_.token;
    }

    static void reply(httplib::Response& res, int status, const json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    bool gate(const httplib::Request& req, httplib::Response& res) const {
        if (authorized(req)) return true;
        reply(res, 401, json{{"error", "UNAUTHORIZED"}});
        return false;
    }

    void apply_field(const std::string& record_id, const std::string& field, const json& value) {
        if (value.is_null()) {
            auto it = state_.records.find(record_id);
            if (it == state_.records.end()) return;
            it->second.erase(field);
            if (it->second.empty()) state_.records.erase(it);
        } else {
            state_.records[record_id][field] = value.get<std::string>();
        }
    }

    void setup_routes() {
        svr_.Post("/import", [this](const httplib::Request& req, httplib::Response& res) {
            if (!gate(req, res)) return;
            try {
                json body = json::parse(req.body);
                std::string rid = body.at("record_id").get<std::string>();
                std::lock_guard lock(mu_);
                for (const auto& [field, value] : body.at("fields").items())
                    apply_field(rid, field, value);
                persist_locked();
                reply(res, 200, json{{"ok", true}});
            } catch (const std::exception& e) {
                reply(res, 400, json{{"error", "BAD_REQUEST"}, {"detail", e.what()}});
            }
        });

        svr_.Post("/export", [this](const httplib::Request& req, httplib::Response& res) {
            if (!gate(req, res)) return;
            try {
                json body = json::parse(req.body);
                std::string rid = body.at("record_id").get<std::string>();
                std::lock_guard lock(mu_);
                auto it = state_.records.find(rid);
                if (it == state_.records.end()) {
                    reply(res, 404, json{{"error", "NOT_FOUND"}});
                    return;
                }
                json fields = json::object();
                for (const auto& [f, v] : it->second) fields[f] = v;
                reply(res, 200, json{{"record_id", rid}, {"fields", std::move(fields)}});
            } catch (const std::exception& e) {
                reply(res, 400, json{{"error", "BAD_REQUEST"}, {"detail", e.what()}});
            }
        });

        svr_.Get("/records", [this](const httplib::Request& req, httplib::Response& res) {
            if (!gate(req, res)) return;
            std::lock_guard lock(mu_);
            reply(res, 200, to_json(state_));
        });

        svr_.Post("/backdoor/set", [this](const httplib::Request& req, httplib::Response& res) {
            if (!gate(req, res)) return;
            if (!cfg_.enable_backdoor) {
                reply(res, 403, json{{"error", "BACKDOOR_DISABLED"}});
                return;
            }
            try {
                json body = json::parse(req.body);
                std::lock_guard lock(mu_);
                apply_field(body.at("record_id").get<std::string>(),
                            body.at("field_name").get<std::string>(), body.at("value"));
                persist_locked();
                reply(res, 200, json{{"ok", true}});
            } catch (const std::exception& e) {
                reply(res, 400, json{{"error", "BAD_REQUEST"}, {"detail", e.what()}});
            }
        });
    }

    RecordStoreConfig cfg_;
    mutable std::mutex mu_;
    RecordStoreState state_;
    httplib::Server svr_;
};

}  // namespace scrybe
