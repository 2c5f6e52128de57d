(function (root, factory) {
  if (typeof define === 'function' && define.amd) {
    define([], factory);
  } else if (typeof module === 'object' && module.exports) {
    module.exports = factory();
  } else {
    root.Lib = factory();
  }
}(typeof self !== 'undefined' ? self : this, function () {
  'use strict';
  var Lib = {};
  Lib.version = '1.0.0';
  Lib.sum = function (list) {
    return list.reduce(function (acc, x) { return acc + x; }, 0);
  };
  return Lib;
}));
