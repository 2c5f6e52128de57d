class Counter {
  #count = 0;
  static #instances = 0;
  static {
    Counter.#instances = 0;
    const helper = () => Counter.#instances;
    helper();
  }
  #bump() {
    return ++this.#count;
  }
  get #secret() {
    return 'shh';
  }
  static get instances() {
    return Counter.#instances;
  }
  handler = () => this.#bump();
  field = function () { return 1; };
  increment() {
    return this.#bump();
  }
  has(o) { return #count in o; }
}
new Counter().increment();
