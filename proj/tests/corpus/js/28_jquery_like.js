(function (window, undefined) {
  var jq = function (selector) {
    return new jq.fn.init(selector);
  };
  jq.fn = jq.prototype = {
    constructor: jq,
    init: function (selector) {
      this.selector = selector;
      return this;
    },
    each: function (cb) {
      for (var i = 0; i < this.length; i++) {
        if (cb.call(this[i], i) === false) break;
      }
      return this;
    },
  };
  jq.fn.init.prototype = jq.fn;
  jq.extend = function (target) {
    var sources = [].slice.call(arguments, 1);
    sources.forEach(function (s) {
      for (var k in s) target[k] = s[k];
    });
    return target;
  };
  window.jq = jq;
})(window);
