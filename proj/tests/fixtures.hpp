#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "farmlens/model.hpp"

namespace fixtures {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("farmlens-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline farmlens::TimelinePost post(std::string text, std::int64_t ts, std::int64_t likes = 0,
                                   std::int64_t comments = 0, bool shared = false) {
    farmlens::TimelinePost p;
    p.text = std::move(text);
    p.timestamp = ts;
    p.n_likes = likes;
    p.n_comments = comments;
    p.is_shared = shared;
    return p;
}

inline farmlens::Account account(std::string id, farmlens::Label label) {
    farmlens::Account a;
    a.id = std::move(id);
    a.label = std::move(label);
    return a;
}

// Three accounts, two pages, one friendship.
inline farmlens::Dataset small_dataset() {
    using namespace farmlens;
    Dataset d;
    d.pages["p1"] = Page{"p1", 500, "Brand", false};
    d.pages["p2"] = Page{"p2", 200000, "Film", true};
    auto a = account("u1", Label::baseline());
    a.posts = {post("this is a test of the system", 100, 2, 1), post("shared link", 200, 0, 0, true)};
    a.liked_pages = {{"p1", 50}, {"p2", 60}};
    a.friends = {"u2"};
    a.demographics = {Gender::female, AgeBin::a25_34, "US"};
    auto b = account("u2", Label::farm("BL-USA"));
    b.posts = {post("ceci est un texte purement français sans mots anglais", 10, 5, 0)};
    b.liked_pages = {{"p2", 70}};
    b.demographics = {Gender::male, AgeBin::a18_24, "FR"};
    auto c = account("u3", Label::farm("AL-USA"));
    c.demographics = {Gender::unknown, AgeBin::a55_plus, "unknown"};
    c.active = false;
    d.accounts = {a, b, c};
    d.provenance = {{"fixture", "small"}};
    return d;
}

} // namespace fixtures
