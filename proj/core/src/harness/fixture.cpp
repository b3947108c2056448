#include "twinaudit/harness/fixture.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "certs.hpp"
#include "twinaudit/errors.hpp"
#include "twinaudit/evidence/snapshot.hpp"

namespace twinaudit::harness {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string_view ToString(FixtureName name) {
  return name == FixtureName::kSmb ? "smb" : "minimal";
}

std::optional<FixtureName> ParseFixtureName(std::string_view text) {
  if (text == "smb" || text == "SMB") return FixtureName::kSmb;
  if (text == "minimal" || text == "MINIMAL") return FixtureName::kMinimal;
  return std::nullopt;
}

std::string GroupForRole(const std::string& role) {
  static const std::map<std::string, std::string> groups = {
      {"web-server", "Web Server"},
      {"microservices", "Microservices"},
      {"management-system", "Management System"},
      {"mail-server", "Mail Server"},
      {"user-workstation", "Users"},
      {"single-server", "Single Server"},
  };
  auto it = groups.find(role);
  return it == groups.end() ? role : it->second;
}

const std::vector<std::string>& GroupOrder() {
  static const std::vector<std::string> order = {"Web Server", "Microservices",
                                                 "Management System", "Mail Server", "Users",
                                                 "Single Server"};
  return order;
}

FixtureSpec FixtureSpec::Minimal(std::uint64_t seed) {
  FixtureSpec s;
  s.name = FixtureName::kMinimal;
  s.seed = seed;
  s.targets = {{"Single Server", {"server"}, {5, 3, 5, 1}}};
  return s;
}

FixtureSpec FixtureSpec::Smb(std::uint64_t seed) {
  FixtureSpec s;
  s.name = FixtureName::kSmb;
  s.seed = seed;
  // {algorithms, vulnerabilities, components, certificates}
  s.targets = {
      {"Web Server", {"web-server"}, {8, 24, 29, 1}},
      {"Microservices", {"microservices"}, {8, 12, 9, 0}},
      {"Management System", {"management"}, {10, 7, 6, 0}},
      {"Mail Server", {"mail-server"}, {9, 0, 4, 1}},
      {"Users", {"ws-alice", "ws-bob", "ws-carol"}, {23, 153, 75, 3}},
  };
  return s;
}

FixtureSpec FixtureSpec::For(FixtureName name, std::uint64_t seed) {
  return name == FixtureName::kSmb ? Smb(seed) : Minimal(seed);
}

namespace {

struct Dep {
  std::string name;
  std::string version;
  std::string group;  // maven groupId
  bool dev = false;
};

enum class Ecosystem { kNpm, kComposer, kPip, kMaven };

struct Project {
  Ecosystem ecosystem;
  std::string dir;  // relative to the host root
  std::string name;
  std::string version;
  std::string group;
  std::vector<Dep> deps;
  bool use_properties = false;
};

struct HostPlan {
  std::string id;
  std::string role;
  std::string segment;
  std::vector<Project> projects;
  std::map<std::string, std::string> files;
  // Vulnerable dependencies, one CVE per entry; names may repeat.
  std::vector<Dep> vulnerable;
  bool tar = false;
};

struct Version {
  int major = 0, minor = 0, patch = 0;
};

Version SplitVersion(const std::string& v) {
  Version out;
  char dot = 0;
  std::istringstream in(v);
  in >> out.major >> dot >> out.minor >> dot >> out.patch;
  return out;
}

std::string Join(const Version& v) {
  return std::to_string(v.major) + "." + std::to_string(v.minor) + "." + std::to_string(v.patch);
}

std::string HexDecode(std::string_view hex) {
  std::string out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
    out.push_back(static_cast<char>(std::stoi(std::string(hex.substr(i, 2)), nullptr, 16)));
  }
  return out;
}

std::vector<Dep> Deps(std::initializer_list<std::pair<const char*, const char*>> list,
                      const std::string& group = "") {
  std::vector<Dep> out;
  for (const auto& [n, v] : list) out.push_back({n, v, group, false});
  return out;
}

std::string RenderPackageJson(const Project& p) {
  ordered_json j;
  j["name"] = p.name;
  j["version"] = p.version;
  j["private"] = true;
  ordered_json deps = ordered_json::object();
  ordered_json dev = ordered_json::object();
  for (const auto& d : p.deps) (d.dev ? dev : deps)[d.name] = d.version;
  j["dependencies"] = deps;
  if (!dev.empty()) j["devDependencies"] = dev;
  return j.dump(2) + "\n";
}

std::string RenderComposerJson(const Project& p) {
  ordered_json j;
  j["name"] = p.name;
  j["type"] = "project";
  j["version"] = p.version;
  ordered_json req = ordered_json::object();
  req["php"] = "^8.1";
  req["ext-openssl"] = "*";
  ordered_json dev = ordered_json::object();
  for (const auto& d : p.deps) (d.dev ? dev : req)[d.name] = d.version;
  j["require"] = req;
  if (!dev.empty()) j["require-dev"] = dev;
  return j.dump(4) + "\n";
}

std::string RenderRequirements(const Project& p) {
  std::string out = "# " + p.name + " runtime dependencies\n";
  for (const auto& d : p.deps) out += d.name + "==" + d.version + "\n";
  return out;
}

std::string RenderPom(const Project& p) {
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<project xmlns=\"http://maven.apache.org/POM/4.0.0\">\n"
    << "  <modelVersion>4.0.0</modelVersion>\n"
    << "  <groupId>" << p.group << "</groupId>\n"
    << "  <artifactId>" << p.name << "</artifactId>\n"
    << "  <version>" << p.version << "</version>\n"
    << "  <properties>\n    <java.version>17</java.version>\n";
  std::map<std::string, std::string> props;
  if (p.use_properties) {
    for (const auto& d : p.deps) {
      if (d.group.rfind("org.springframework", 0) == 0) props["spring-boot.version"] = d.version;
    }
  }
  for (const auto& [k, v] : props) o << "    <" << k << ">" << v << "</" << k << ">\n";
  o << "  </properties>\n  <dependencies>\n";
  for (const auto& d : p.deps) {
    std::string version = d.version;
    if (props.count("spring-boot.version") && d.group.rfind("org.springframework", 0) == 0) {
      version = "${spring-boot.version}";
    }
    o << "    <dependency>\n"
      << "      <groupId>" << d.group << "</groupId>\n"
      << "      <artifactId>" << d.name << "</artifactId>\n"
      << "      <version>" << version << "</version>\n";
    if (d.dev) o << "      <scope>test</scope>\n";
    o << "    </dependency>\n";
  }
  o << "  </dependencies>\n</project>\n";
  return o.str();
}

std::pair<std::string, std::string> RenderManifest(const Project& p) {
  switch (p.ecosystem) {
    case Ecosystem::kNpm:
      return {p.dir + "/package.json", RenderPackageJson(p)};
    case Ecosystem::kComposer:
      return {p.dir + "/composer.json", RenderComposerJson(p)};
    case Ecosystem::kPip:
      return {p.dir + "/requirements.txt", RenderRequirements(p)};
    case Ecosystem::kMaven:
      return {p.dir + "/pom.xml", RenderPom(p)};
  }
  return {};
}

std::string ElfStub(const std::string& soname) {
  std::string out("\x7f" "ELF\x02\x01\x01", 7);
  out.append(9, '\0');
  out += soname;
  out.push_back('\0');
  return out;
}

void AddCommonFiles(HostPlan& h, const std::string& auth_log) {
  h.files["etc/hostname"] = h.id + "\n";
  h.files["etc/os-release"] =
      "NAME=\"Ubuntu\"\nVERSION=\"22.04.4 LTS (Jammy Jellyfish)\"\nID=ubuntu\n"
      "PRETTY_NAME=\"Ubuntu 22.04.4 LTS\"\nVERSION_ID=\"22.04\"\n";
  h.files["etc/sysctl.conf"] =
      "kernel.randomize_va_space = 2\n"
      "net.ipv4.tcp_syncookies = 1\n"
      "net.ipv4.conf.all.rp_filter = 1\n"
      "fs.protected_symlinks = 1\n";
  h.files["var/log/auth.log"] = auth_log;
  h.files["usr/lib/x86_64-linux-gnu/libssl.so.3"] = ElfStub("libssl.so.3");
  h.files["usr/lib/x86_64-linux-gnu/libcrypto.so.3"] = ElfStub("libcrypto.so.3");
  ordered_json facts;
  facts["host_id"] = h.id;
  facts["hostname"] = h.id + ".example.test";
  facts["os"] = "Ubuntu 22.04.4 LTS";
  facts["collected_by"] = "snapshot-agent";
  h.files["facts.json"] = facts.dump(2) + "\n";
}

std::string AuthLog(const std::string& host, int failures) {
  std::string out;
  out += "Oct  3 08:12:01 " + host + " sshd[1021]: Accepted publickey for admin from 10.0.0.5 port 50122\n";
  for (int i = 0; i < failures; ++i) {
    out += "Oct  3 08:1" + std::to_string(5 + i) + ":44 " + host + " sshd[" +
           std::to_string(1044 + i) + "]: Failed password for invalid user test from 203.0.113." +
           std::to_string(9 + i) + " port 412" + std::to_string(i) + "\n";
  }
  out += "Oct  3 09:01:12 " + host + " sudo: pam_unix(sudo:session): session opened for user root\n";
  return out;
}

// Spreads `count` CVEs over `deps` round-robin.
std::vector<Dep> Spread(const std::vector<Dep>& deps, std::size_t count) {
  std::vector<Dep> out;
  for (std::size_t i = 0; i < count && !deps.empty(); ++i) out.push_back(deps[i % deps.size()]);
  return out;
}

std::vector<Dep> AllDeps(const HostPlan& h) {
  std::vector<Dep> out;
  for (const auto& p : h.projects) {
    for (const auto& d : p.deps) {
      const bool seen = std::any_of(out.begin(), out.end(), [&](const Dep& x) {
        return x.name == d.name && x.version == d.version;
      });
      if (!seen) out.push_back(d);
    }
  }
  return out;
}

HostPlan WebServer() {
  HostPlan h{"web-server", "web-server", "DMZ", {}, {}, {}, false};
  Project npm{Ecosystem::kNpm, "srv/storefront", "storefront", "2.4.1", "", {}};
  npm.deps = Deps({{"react", "18.2.0"}, {"react-dom", "18.2.0"}, {"react-router-dom", "6.22.3"},
                   {"axios", "1.6.7"}, {"lodash", "4.17.21"}, {"moment", "2.29.4"},
                   {"redux", "4.2.1"}, {"@reduxjs/toolkit", "2.2.1"},
                   {"styled-components", "6.1.8"}, {"formik", "2.4.5"}, {"yup", "1.3.3"},
                   {"dayjs", "1.11.10"}, {"classnames", "2.5.1"}, {"webpack", "5.90.3"}});
  npm.deps.back().dev = true;
  Project composer{Ecosystem::kComposer, "srv/backoffice", "acme/backoffice", "1.8.0", "", {}};
  composer.deps = Deps({{"laravel/framework", "10.48.4"}, {"guzzlehttp/guzzle", "7.8.1"},
                        {"monolog/monolog", "3.5.0"}, {"symfony/http-foundation", "6.4.4"},
                        {"symfony/console", "6.4.4"}, {"nesbot/carbon", "2.72.3"},
                        {"league/flysystem", "3.25.1"}, {"vlucas/phpdotenv", "5.6.0"},
                        {"doctrine/dbal", "3.8.3"}, {"firebase/php-jwt", "6.10.0"},
                        {"phpmailer/phpmailer", "6.9.1"}, {"phpunit/phpunit", "10.5.13"},
                        {"mockery/mockery", "1.6.9"}});
  composer.deps[11].dev = composer.deps[12].dev = true;
  h.projects = {npm, composer};
  AddCommonFiles(h, AuthLog("web-server", 3));
  h.files["etc/ssl/certs/www.example.test.pem"] = certs::kWebServerCertPem;
  h.files["etc/nginx/nginx.conf"] =
      "user www-data;\n"
      "worker_processes auto;\n"
      "events { worker_connections 768; }\n"
      "http {\n"
      "    include /etc/nginx/mime.types;\n"
      "    server {\n"
      "        listen 443 ssl http2;\n"
      "        server_name www.example.test;\n"
      "        ssl_certificate /etc/ssl/certs/www.example.test.pem;\n"
      "        ssl_certificate_key /etc/ssl/private/www.example.test.key;\n"
      "        ssl_protocols TLSv1.2 TLSv1.3;\n"
      "        ssl_ciphers ECDHE-ECDSA-AES128-GCM-SHA256:ECDHE-ECDSA-AES256-GCM-SHA384:"
      "ECDHE-ECDSA-CHACHA20-POLY1305;\n"
      "        ssl_ecdh_curve X25519:prime256v1;\n"
      "        ssl_prefer_server_ciphers on;\n"
      "        location / { proxy_pass http://127.0.0.1:3000; }\n"
      "    }\n"
      "}\n";
  h.files["etc/backoffice/app.env"] =
      "APP_ENV=production\n"
      "APP_URL=https://www.example.test/admin\n"
      "JWT_SIGNING_KEY=rsa:2048\n"
      "SESSION_DRIVER=redis\n";
  h.files["var/log/nginx/error.log"] =
      "2024/10/03 10:22:13 [crit] 812#812: *31 SSL_do_handshake() failed (SSL: error:0A000076) "
      "while SSL handshaking, client: 198.51.100.23\n"
      "2024/10/03 10:40:02 [info] 812#812: *44 client closed connection while waiting for request\n";
  h.files["srv/storefront/yarn.lock"] = "# yarn lockfile v1\n";
  h.files["var/lib/dpkg/packages.list"] =
      "openssl 3.0.2-0ubuntu1.15\nlibssl3 3.0.2-0ubuntu1.15\nnginx 1.18.0-6ubuntu14.4\n";
  ordered_json facts = ordered_json::parse(h.files["facts.json"]);
  facts["packages"] = "var/lib/dpkg/packages.list";
  h.files["facts.json"] = facts.dump(2) + "\n";
  h.vulnerable = Spread(AllDeps(h), 24);
  return h;
}

HostPlan Microservices() {
  HostPlan h{"microservices", "microservices", "LAN", {}, {}, {}, false};
  std::vector<Dep> shared = {
      {"spring-boot-starter-web", "3.2.3", "org.springframework.boot"},
      {"spring-boot-starter-data-jpa", "3.2.3", "org.springframework.boot"},
      {"jackson-databind", "2.16.1", "com.fasterxml.jackson.core"},
      {"postgresql", "42.7.2", "org.postgresql"},
      {"logback-classic", "1.4.14", "ch.qos.logback"},
      {"bcprov-jdk18on", "1.77", "org.bouncycastle"},
  };
  for (const char* svc : {"orders-service", "inventory-service", "billing-service"}) {
    Project p{Ecosystem::kMaven, std::string("opt/") + svc, svc, "1.0.0", "com.acme", shared};
    p.use_properties = std::string(svc) == "orders-service";
    h.projects.push_back(p);
  }
  AddCommonFiles(h, AuthLog("microservices", 1));
  h.files["etc/orders-service/application.properties"] =
      "server.port=8443\n"
      "server.ssl.enabled=true\n"
      "server.ssl.enabled-protocols=TLSv1.3,TLSv1.2\n"
      "server.ssl.ciphers=ECDHE-RSA-AES256-GCM-SHA384,ECDHE-RSA-AES128-GCM-SHA256\n";
  h.files["etc/inventory-service/application.properties"] =
      "server.port=8081\n"
      "security.jwt.algorithm=HmacSHA256\n"
      "security.password.encoder=PBKDF2-HMAC-SHA256\n";
  h.files["etc/billing-service/application.properties"] =
      "server.port=8082\n"
      "payment.keystore.key-algorithm=RSA-3072\n"
      "payment.tls.named-groups=X25519\n";
  std::vector<Dep> twice;
  for (const auto& d : shared) twice.insert(twice.end(), {d, d});
  h.vulnerable = twice;
  return h;
}

HostPlan Management() {
  HostPlan h{"management", "management-system", "LAN", {}, {}, {}, false};
  Project p{Ecosystem::kPip, "srv/asset-portal", "asset-portal", "", "", {}};
  p.deps = Deps({{"Django", "4.2.10"}, {"celery", "5.3.6"}, {"requests", "2.31.0"},
                 {"cryptography", "42.0.4"}, {"psycopg2-binary", "2.9.9"}});
  h.projects = {p};
  AddCommonFiles(h, AuthLog("management", 4));
  h.files["etc/ssh/sshd_config"] =
      "Port 22\n"
      "PermitRootLogin no\n"
      "PasswordAuthentication no\n"
      "HostKey /etc/ssh/ssh_host_ed25519_key\n"
      "Ciphers chacha20-poly1305@openssh.com,aes256-gcm@openssh.com,aes128-ctr\n"
      "MACs hmac-sha2-512-etm@openssh.com,hmac-sha2-256-etm@openssh.com\n";
  h.files["etc/asset-portal/settings.ini"] =
      "[security]\n"
      "password_hasher = PBKDF2-SHA256\n"
      "field_encryption = AES-256-CBC\n"
      "report_digest = SHA3-256\n"
      "\n"
      "[signing]\n"
      "key_algorithm = RSA-3072\n";
  h.vulnerable = Spread(AllDeps(h), 7);
  return h;
}

HostPlan MailServer() {
  HostPlan h{"mail-server", "mail-server", "DMZ", {}, {}, {}, false};
  Project p{Ecosystem::kPip, "srv/mail-filter", "mail-filter", "", "", {}};
  p.deps = Deps({{"dkimpy", "1.1.5"}, {"aiosmtpd", "1.4.4"}, {"dnspython", "2.6.1"}});
  h.projects = {p};
  AddCommonFiles(h, AuthLog("mail-server", 2));
  h.files[std::string(kSwappedCertificatePath)] = certs::kMailServerCertPem;
  h.files["etc/postfix/main.cf"] =
      "smtpd_banner = $myhostname ESMTP\n"
      "myhostname = mail.example.test\n"
      "smtpd_tls_cert_file = /etc/ssl/certs/mail.example.test.pem\n"
      "smtpd_tls_key_file = /etc/ssl/private/mail.example.test.key\n"
      "smtpd_tls_security_level = may\n"
      "smtpd_tls_protocols = !SSLv2, !SSLv3, !TLSv1, !TLSv1.1\n"
      "tls_high_cipherlist = ECDHE-ECDSA-AES256-GCM-SHA384:ECDHE-ECDSA-AES128-GCM-SHA256:"
      "ECDHE-ECDSA-CHACHA20-POLY1305\n"
      "tls_eecdh_auto_curves = X25519 prime256v1\n"
      "smtpd_tls_dh1024_param_file = /etc/postfix/ffdhe2048.pem\n";
  h.files["var/log/mail.log"] =
      "Oct  3 11:02:41 mail-server postfix/smtpd[2201]: warning: TLS library problem: "
      "certificate verify failed\n"
      "Oct  3 11:05:09 mail-server postfix/smtpd[2230]: SSL_accept error from "
      "unknown[198.51.100.7]: no shared cipher\n";
  return h;
}

HostPlan Workstation(const std::string& id, const std::string& user, Ecosystem eco,
                     const std::string& project, std::vector<Dep> deps) {
  HostPlan h{id, "user-workstation", "LAN", {}, {}, {}, false};
  Project p{eco, "home/" + user + "/" + project, project, "", "", std::move(deps)};
  if (eco == Ecosystem::kNpm) p.version = "0.9.0";
  if (eco == Ecosystem::kMaven) {
    p.version = "2.1.0";
    p.group = "org.example." + user;
  }
  h.projects = {p};
  AddCommonFiles(h, AuthLog(id, 1));
  h.vulnerable = Spread(AllDeps(h), 51);
  return h;
}

std::vector<HostPlan> SmbHosts() {
  std::vector<HostPlan> hosts = {WebServer(), Microservices(), Management(), MailServer()};

  HostPlan alice = Workstation(
      "ws-alice", "alice", Ecosystem::kPip, "ml-notebooks",
      Deps({{"numpy", "1.26.4"}, {"pandas", "2.2.1"}, {"scipy", "1.12.0"},
            {"scikit-learn", "1.4.1"}, {"matplotlib", "3.8.3"}, {"seaborn", "0.13.2"},
            {"jupyterlab", "4.1.4"}, {"notebook", "7.1.1"}, {"ipython", "8.22.2"},
            {"tornado", "6.4.0"}, {"jinja2", "3.1.3"}, {"pyyaml", "6.0.1"},
            {"pillow", "10.2.0"}, {"urllib3", "2.2.1"}, {"certifi", "2024.2.2"},
            {"idna", "3.6.0"}, {"charset-normalizer", "3.3.2"}, {"sqlalchemy", "2.0.28"},
            {"flask", "3.0.2"}, {"werkzeug", "3.0.1"}, {"itsdangerous", "2.1.2"},
            {"click", "8.1.7"}, {"tqdm", "4.66.2"}, {"paramiko", "3.4.0"}}));
  alice.files["etc/ssl/certs/alice.workstation.der"] = HexDecode(certs::kUser1CertDerHex);
  alice.files["etc/ssl/openssl.cnf"] =
      "[ req ]\n"
      "default_md = sha256\n"
      "\n"
      "[ system_default_sect ]\n"
      "Groups = ffdhe2048\n";
  alice.files["etc/ssh/ssh_config"] =
      "Host legacy-nas\n"
      "    HostName 10.0.20.5\n"
      "    KexAlgorithms diffie-hellman-group14-sha1\n"
      "    Ciphers aes256-cbc,3des-cbc\n"
      "    MACs hmac-md5\n"
      "Host *\n"
      "    HostKeyAlgorithms ssh-ed25519\n";

  HostPlan bob = Workstation(
      "ws-bob", "bob", Ecosystem::kNpm, "dashboard-ui",
      Deps({{"vue", "3.4.21"}, {"vue-router", "4.3.0"}, {"pinia", "2.1.7"}, {"vite", "5.1.6"},
            {"typescript", "5.4.2"}, {"eslint", "8.57.0"}, {"prettier", "3.2.5"},
            {"jest", "29.7.0"}, {"@vue/test-utils", "2.4.5"}, {"sass", "1.71.1"},
            {"postcss", "8.4.35"}, {"autoprefixer", "10.4.18"}, {"tailwindcss", "3.4.1"},
            {"chart.js", "4.4.2"}, {"d3", "7.9.0"}, {"three", "0.162.0"},
            {"socket.io-client", "4.7.5"}, {"express", "4.19.2"}, {"body-parser", "1.20.2"},
            {"cors", "2.8.5"}, {"jsonwebtoken", "9.0.2"}, {"bcryptjs", "2.4.3"},
            {"mongoose", "8.2.1"}, {"dotenv", "16.4.5"}}));
  bob.files["etc/ssl/certs/bob.workstation.pem"] = certs::kUser2CertPem;
  bob.files["etc/ssl/openssl.cnf"] = "[ req ]\ndefault_md = sha512\n";
  bob.files["etc/ssh/ssh_config"] =
      "Host *\n"
      "    HostKeyAlgorithms ssh-ed448\n"
      "    KexAlgorithms x448\n"
      "    Ciphers aes128-cbc,camellia256-cbc\n"
      "    MACs hmac-sha512\n";

  std::vector<Dep> carol_deps = {
      {"guava", "33.0.0", "com.google.guava"},
      {"commons-lang3", "3.14.0", "org.apache.commons"},
      {"commons-io", "2.15.1", "commons-io"},
      {"commons-codec", "1.16.1", "commons-codec"},
      {"commons-csv", "1.10.0", "org.apache.commons"},
      {"httpclient5", "5.3.1", "org.apache.httpcomponents.client5"},
      {"okhttp", "4.12.0", "com.squareup.okhttp3"},
      {"gson", "2.10.1", "com.google.code.gson"},
      {"jackson-core", "2.17.0", "com.fasterxml.jackson.core"},
      {"jackson-annotations", "2.17.0", "com.fasterxml.jackson.core"},
      {"slf4j-api", "2.0.12", "org.slf4j"},
      {"log4j-core", "2.23.1", "org.apache.logging.log4j"},
      {"log4j-api", "2.23.1", "org.apache.logging.log4j"},
      {"kafka-clients", "3.7.0", "org.apache.kafka"},
      {"avro", "1.11.3", "org.apache.avro"},
      {"parquet-hadoop", "1.13.1", "org.apache.parquet"},
      {"snakeyaml", "2.2.0", "org.yaml"},
      {"hibernate-core", "6.4.4", "org.hibernate.orm"},
      {"h2", "2.2.224", "com.h2database"},
      {"junit-jupiter", "5.10.2", "org.junit.jupiter", true},
      {"mockito-core", "5.11.0", "org.mockito", true},
      {"assertj-core", "3.25.3", "org.assertj", true},
      {"netty-handler", "4.1.107", "io.netty"},
      {"zstd-jni", "1.5.5", "com.github.luben"},
  };
  HostPlan carol = Workstation("ws-carol", "carol", Ecosystem::kMaven, "etl-toolkit", carol_deps);
  carol.tar = true;
  carol.files["etc/ssl/certs/carol.workstation.pem"] = certs::kUser3CertPem;
  carol.files["etc/ssl/openssl.cnf"] =
      "[ req ]\n"
      "default_md = sha3-256\n"
      "\n"
      "[ system_default_sect ]\n"
      "Groups = secp521r1\n";
  carol.files["etc/ssh/ssh_config"] =
      "Host *\n"
      "    Ciphers aes192-cbc,chacha20-poly1305@openssh.com\n";
  carol.files["etc/restic/backup.conf"] = "repository = sftp:backup.example.test:/restic\nhash = blake2b512\n";

  hosts.push_back(std::move(alice));
  hosts.push_back(std::move(bob));
  hosts.push_back(std::move(carol));
  return hosts;
}

std::vector<HostPlan> MinimalHosts() {
  HostPlan h{"server", "single-server", "DMZ", {}, {}, {}, false};
  Project p{Ecosystem::kNpm, "srv/portal", "portal", "1.0.0", "", {}};
  p.deps = Deps({{"express", "4.18.2"}, {"helmet", "7.1.0"}, {"morgan", "1.10.0"},
                 {"pug", "3.0.2"}});
  h.projects = {p};
  AddCommonFiles(h, AuthLog("server", 2));
  h.files["etc/ssl/certs/server.example.test.pem"] = certs::kSingleServerCertPem;
  h.files["etc/nginx/nginx.conf"] =
      "events { worker_connections 256; }\n"
      "http {\n"
      "    server {\n"
      "        listen 443 ssl;\n"
      "        ssl_certificate /etc/ssl/certs/server.example.test.pem;\n"
      "        ssl_protocols TLSv1.2 TLSv1.3;\n"
      "        ssl_ciphers ECDHE-RSA-AES128-GCM-SHA256:ECDHE-RSA-AES256-GCM-SHA384;\n"
      "    }\n"
      "}\n";
  h.vulnerable = Spread(AllDeps(h), 3);
  return {h};
}

std::vector<HostPlan> PlanFor(const FixtureSpec& spec) {
  return spec.name == FixtureName::kSmb ? SmbHosts() : MinimalHosts();
}

ordered_json FeedRecord(const std::string& cve, const std::string& summary, double score,
                        const std::string& vector, ordered_json affects) {
  ordered_json j;
  j["cve"] = cve;
  j["summary"] = summary;
  j["cvss"] = {{"score", score}, {"vector", vector}};
  j["affects"] = std::move(affects);
  return j;
}

ordered_json Range(const std::string& name, const std::string& introduced,
                   const std::string& end_key, const std::string& end) {
  ordered_json a;
  a["name"] = name;
  a["introduced"] = introduced;
  a[end_key] = end;
  return a;
}

std::string RenderFeed(const std::vector<HostPlan>& hosts, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  static const char* kVectors[] = {
      "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H",
      "CVSS:3.1/AV:N/AC:L/PR:N/UI:R/S:C/C:L/I:L/A:N",
      "CVSS:3.1/AV:N/AC:H/PR:N/UI:N/S:U/C:H/I:N/A:N",
      "CVSS:3.1/AV:L/AC:L/PR:L/UI:N/S:U/C:N/I:N/A:H",
  };
  std::vector<std::string> lines;
  std::uint64_t counter = 0;
  auto next_id = [&] {
    const std::uint64_t r = rng();
    const std::string id = "CVE-" + std::to_string(2020 + r % 5) + "-" +
                           std::to_string(20000 + counter * 10 + r % 10);
    ++counter;
    return id;
  };
  auto score = [&] { return static_cast<double>(20 + rng() % 81) / 10.0; };
  std::string duplicate;
  for (const auto& h : hosts) {
    for (std::size_t i = 0; i < h.vulnerable.size(); ++i) {
      const Dep& d = h.vulnerable[i];
      const Version v = SplitVersion(d.version);
      Version next = v;
      ++next.patch;
      ordered_json range;
      switch ((i + rng() % 3) % 3) {
        case 0:
          range = Range(d.name, "0", "fixed", Join(next));
          break;
        case 1:
          range = Range(d.name, d.version, "lastAffected", d.version);
          break;
        default:
          range = Range(d.name, std::to_string(v.major) + ".0.0", "fixed", Join(next));
          break;
      }
      const std::string line =
          FeedRecord(next_id(), "Flaw in " + d.name + " allows crafted input to bypass checks",
                     score(), kVectors[rng() % 4], ordered_json::array({range}))
              .dump();
      if (duplicate.empty()) duplicate = line;
      lines.push_back(line);
    }
    // Decoys: every range here excludes the installed version.
    const auto deps = AllDeps(h);
    if (!deps.empty()) {
      const Dep& d = deps[rng() % deps.size()];
      Version v = SplitVersion(d.version);
      lines.push_back(FeedRecord(next_id(), "Fixed before the installed " + d.name, score(),
                                 kVectors[0],
                                 ordered_json::array({Range(d.name, "0", "fixed", d.version)}))
                          .dump());
      ++v.patch;
      lines.push_back(FeedRecord(next_id(), "Regression in later " + d.name, score(), kVectors[1],
                                 ordered_json::array({Range(d.name, Join(v), "fixed",
                                                            Join({v.major, v.minor, v.patch + 3}))}))
                          .dump());
    }
    lines.push_back(FeedRecord(next_id(), "Package not deployed on " + h.id, score(), kVectors[2],
                               ordered_json::array({Range(h.id + "-legacy-agent", "0", "fixed",
                                                          "9.9.9")}))
                        .dump());
  }
  if (!duplicate.empty()) lines.push_back(duplicate);
  lines.push_back(R"({"cve": "CVE-2024-99999", "summary": "truncated)");
  std::shuffle(lines.begin(), lines.end(), rng);
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string RenderInventory(const std::vector<HostPlan>& hosts, FixtureName name) {
  std::string out = "hosts:\n";
  for (const auto& h : hosts) {
    out += "  - host_id: " + h.id + "\n";
    out += "    role: " + h.role + "\n";
    out += "    segment: " + h.segment + "\n";
    out += "    snapshot_ref: hosts/" + h.id + (h.tar ? ".tar" : "") + "\n";
  }
  if (name == FixtureName::kSmb) {
    out += "relationships:\n";
    const std::vector<std::array<const char*, 3>> rels = {
        {"web-server", "microservices", "CONNECTS_TO"},
        {"microservices", "management", "CONNECTS_TO"},
        {"management", "mail-server", "CONNECTS_TO"},
        {"mail-server", "ws-alice", "SERVES"},
        {"mail-server", "ws-bob", "SERVES"},
        {"mail-server", "ws-carol", "SERVES"},
    };
    for (const auto& r : rels) {
      out += std::string("  - from: ") + r[0] + "\n    to: " + r[1] + "\n    kind: " + r[2] + "\n";
    }
  }
  return out;
}

std::string ProfileId(FixtureName name) {
  return name == FixtureName::kSmb ? "smb-audit" : "minimal-audit";
}

std::string RenderProfile(const std::vector<HostPlan>& hosts, FixtureName name) {
  std::vector<std::string> selector;
  for (const auto& h : hosts) {
    const std::string entry = h.role == "user-workstation" ? h.role : h.id;
    if (std::find(selector.begin(), selector.end(), entry) == selector.end()) {
      selector.push_back(entry);
    }
  }
  std::string out = "profile_id: " + ProfileId(name) + "\n";
  out += name == FixtureName::kSmb ? "name: SMB network compliance audit\n"
                                   : "name: Single server audit\n";
  out += "host_selector:\n";
  for (const auto& s : selector) out += "  - " + s + "\n";
  out += "categories:\n";
  for (const char* c : {"CRYPTO_LIBRARY", "CERTIFICATE", "ALGORITHM", "OPENSSL_CONFIG",
                        "KERNEL_SETTING", "SYSTEM_LOG_EVENT", "SOFTWARE_COMPONENT"}) {
    out += std::string("  - ") + c + "\n";
  }
  out += "sync_policy:\n  kind: ON_DEMAND\n";
  return out;
}

std::map<std::string, std::string> HostFiles(const HostPlan& h) {
  std::map<std::string, std::string> files = h.files;
  for (const auto& p : h.projects) files.insert(RenderManifest(p));
  return files;
}

}  // namespace

std::map<std::string, std::string> RenderFixture(const FixtureSpec& spec) {
  const auto hosts = PlanFor(spec);
  std::map<std::string, std::string> out;
  out["inventory.yaml"] = RenderInventory(hosts, spec.name);
  out["profile.yaml"] = RenderProfile(hosts, spec.name);
  out["feed.ndjson"] = RenderFeed(hosts, spec.seed);
  for (const auto& h : hosts) {
    auto files = HostFiles(h);
    if (h.tar) {
      out["hosts/" + h.id + ".tar"] = evidence::WriteTarArchive(files);
    } else {
      for (auto& [path, bytes] : files) out["hosts/" + h.id + "/" + path] = std::move(bytes);
    }
  }
  ordered_json meta;
  meta["fixture"] = ToString(spec.name);
  meta["seed"] = spec.seed;
  meta["profile_id"] = ProfileId(spec.name);
  ordered_json targets = ordered_json::array();
  for (const auto& t : spec.targets) {
    targets.push_back({{"group", t.group},
                       {"hosts", t.hosts},
                       {"algorithms", t.counts.algorithms},
                       {"vulnerabilities", t.counts.vulnerabilities},
                       {"components", t.counts.components},
                       {"certificates", t.counts.certificates}});
  }
  meta["targets"] = targets;
  out["fixture.json"] = meta.dump(2) + "\n";
  return out;
}

FixtureLayout GenerateFixture(const FixtureSpec& spec, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create fixture directory " + out_dir.string() + ": " + ec.message());
  for (const auto& [rel, bytes] : RenderFixture(spec)) {
    const fs::path path = out_dir / rel;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("cannot write " + path.string());
  }
  FixtureLayout layout;
  layout.root = out_dir;
  layout.inventory = out_dir / "inventory.yaml";
  layout.profile = out_dir / "profile.yaml";
  layout.feed = out_dir / "feed.ndjson";
  layout.profile_id = ProfileId(spec.name);
  for (const auto& h : PlanFor(spec)) layout.hosts.push_back(h.id);
  return layout;
}

void ApplyCertificateSwap(const fs::path& fixture_root) {
  const fs::path path = fixture_root / "hosts" / "mail-server" / std::string(kSwappedCertificatePath);
  if (!fs::exists(path)) throw IoError("no mail server certificate at " + path.string());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << certs::kMailServerReplacementCertPem;
  if (!f) throw IoError("cannot write " + path.string());
}

}  // namespace twinaudit::harness
