(function (global) {
  var util = {};
  util.debounce = function (fn, wait) {
    var t = null;
    return function () {
      var ctx = this, args = arguments;
      clearTimeout(t);
      t = setTimeout(function () { fn.apply(ctx, args); }, wait);
    };
  };
  util.throttle = function (fn, wait) {
    var last = 0, pending = null, ctx, args;
    function run() {
      last = Date.now();
      pending = null;
      fn.apply(ctx, args);
    }
    return function () {
      ctx = this;
      args = arguments;
      var remaining = wait - (Date.now() - last);
      if (remaining <= 0) {
        run();
      } else if (!pending) {
        pending = setTimeout(run, remaining);
      }
    };
  };
  util.deepClone = function deepClone(value, seen) {
    seen = seen || new Map();
    if (value === null || typeof value !== 'object') return value;
    if (seen.has(value)) return seen.get(value);
    var copy = Array.isArray(value) ? [] : {};
    seen.set(value, copy);
    Object.keys(value).forEach(function (k) {
      copy[k] = deepClone(value[k], seen);
    });
    if (value instanceof Date) return new Date(value.getTime());
    if (value instanceof RegExp) return new RegExp(value.source, value.flags);
    return copy;
  };
  util.format = function (template, values) {
    return template.replace(/\{(\w+)\}/g, function (_, k) { return k in values ? String(values[k]) : ''; });
  };
  global.util = util;
})(typeof window !== 'undefined' ? window : globalThis);
