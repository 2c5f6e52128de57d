const temp = {
  _c: 0,
  get fahrenheit() { return this._c * 9 / 5 + 32; },
  set fahrenheit(f) { this._c = (f - 32) * 5 / 9; },
  get ['computed' + 'Getter']() { return 1; },
};
Object.defineProperty(temp, 'kelvin', {
  get: function () { return this._c + 273.15; },
  set(v) { this._c = v - 273.15; },
});
class Box {
  static set size(v) {}
  get get() { return 'get'; }
  set set(v) {}
}
