const hex = 0xFF, oct = 0o17, bin = 0b1010, exp = 1e-3, dot = .5;
const obj = {
  if() { return 'if'; },
  class() { return 'class'; },
  function() { return 'function'; },
  new: () => 'new',
  return: function () { return 'return'; },
  async() { return 'async as name'; },
  get() { return 'get as name'; },
  set() { return 'set as name'; },
  static() { return 'static'; },
};
let yield_ = function yield2() {};
var let_ = 1;
