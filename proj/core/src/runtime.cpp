#include "jscov/runtime.hpp"

#include <stdexcept>

#include "json.hpp"

namespace jscov {

namespace {

// Single-line on purpose: inserted code must not shift line numbers.
constexpr std::string_view kPrologue =
    ";var @GLOBAL@=function(g,k,u){var a=[],s=0;"
    "function send(){if(s)return;s=1;try{"
    "var seen={},ids=[],i,b,n=g.navigator,l=g.location;"
    "for(i=0;i<a.length;i++)if(!Object.prototype.hasOwnProperty.call(seen,a[i])){seen[a[i]]=1;ids.push(a[i])}"
    "b=JSON.stringify({v:1,key:k,ids:ids,page:l&&l.href?String(l.href):null});"
    "if(n&&typeof n.sendBeacon==\"function\"&&n.sendBeacon(u,b))return;"
    "var x=new XMLHttpRequest;x.open(\"POST\",u,!1);"
    "x.setRequestHeader(\"Content-Type\",\"text/plain;charset=UTF-8\");x.send(b)"
    "}catch(e){}}"
    "try{var d=g.document,t=function(){g.setTimeout(send,0)};"
    "if(d&&typeof g.addEventListener==\"function\"){if(d.readyState==\"complete\")t();"
    "else g.addEventListener(\"load\",t)}"
    "else g.setTimeout(send,1000)}catch(e){}"
    "return a}("
    "typeof globalThis!=\"undefined\"?globalThis:typeof self!=\"undefined\"?self:this,"
    "@KEY_JSON@,@BEACON_URL@);";

constexpr std::string_view kMarker = ";try{@GLOBAL@.push(@FID@)}catch(e){};";

constexpr std::string_view kArrowOpen = "{@MARKER@return(";
constexpr std::string_view kArrowClose = ")}";

#define JSCOV_LOADER                                                               \
  "function(u,c,x){c=XMLHttpRequest.$jscov=XMLHttpRequest.$jscov||{};"             \
  "if(!(u in c)){x=new XMLHttpRequest;x.open(\"GET\",u,!1);x.send();"              \
  "if(x.status!=200)throw Error(\"jscov: cannot load \"+u+\" (\"+x.status+\")\");" \
  "c[u]=x.responseText}return c[u]}"

constexpr std::string_view kStub = "{@DIRECTIVES@;return eval(" JSCOV_LOADER "(@BODY_URL@))}";
constexpr std::string_view kExpressionStub = "eval(" JSCOV_LOADER "(@BODY_URL@))";
constexpr std::string_view kGeneratorStub = "{@DIRECTIVES@;return yield*eval(" JSCOV_LOADER "(@BODY_URL@))}";

#undef JSCOV_LOADER

constexpr std::string_view kSidecarWrapper = "(()=>@ORIGINAL_BODY@)()";
constexpr std::string_view kAsyncSidecarWrapper = "(async()=>@ORIGINAL_BODY@)()";
// Generators cannot be arrows, so `this` and `arguments` are passed along.
constexpr std::string_view kGeneratorSidecarWrapper = "(function*()@ORIGINAL_BODY@).apply(this,arguments)";
constexpr std::string_view kAsyncGeneratorSidecarWrapper =
    "(async function*()@ORIGINAL_BODY@).apply(this,arguments)";

bool is_placeholder_char(char c) { return (c >= 'A' && c <= 'Z') || c == '_'; }

}  // namespace

const RuntimeTemplates& RuntimeTemplates::defaults() {
  static const RuntimeTemplates templates{
      std::string(kPrologue),
      std::string(kMarker),
      std::string(kArrowOpen),
      std::string(kArrowClose),
      std::string(kStub),
      std::string(kExpressionStub),
      std::string(kGeneratorStub),
      std::string(kSidecarWrapper),
      std::string(kAsyncSidecarWrapper),
      std::string(kGeneratorSidecarWrapper),
      std::string(kAsyncGeneratorSidecarWrapper),
  };
  return templates;
}

std::string render(std::string_view tpl, TemplateValues values) {
  std::string out;
  out.reserve(tpl.size() + 64);
  std::size_t i = 0;
  while (i < tpl.size()) {
    if (tpl[i] == '@') {
      std::size_t j = i + 1;
      while (j < tpl.size() && is_placeholder_char(tpl[j])) ++j;
      if (j > i + 1 && j < tpl.size() && tpl[j] == '@') {
        const std::string_view name = tpl.substr(i + 1, j - i - 1);
        bool found = false;
        for (const auto& [key, value] : values) {
          if (key == name) {
            out += value;
            found = true;
            break;
          }
        }
        if (!found) throw std::invalid_argument("template placeholder @" + std::string(name) + "@ has no value");
        i = j + 1;
        continue;
      }
    }
    out += tpl[i++];
  }
  return out;
}

std::string coverage_global_name(const ResourceKey& key) {
  return "__jscov_" + key.content_hash.substr(0, 16);
}

std::string key_json(const ResourceKey& key) {
  nlohmann::ordered_json j;
  j["url"] = key.url;
  j["hash"] = key.content_hash;
  return j.dump(-1, ' ', true, nlohmann::json::error_handler_t::replace);
}

std::string js_string_literal(std::string_view text) {
  return nlohmann::json(std::string(text)).dump(-1, ' ', true, nlohmann::json::error_handler_t::replace);
}

std::string sidecar_url_base(const ResourceKey& key) {
  return std::string(kSidecarPathPrefix) + key.content_hash;
}

}  // namespace jscov
