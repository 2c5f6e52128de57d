export default class {
  constructor() { this.x = 1; }
  render() { return this.x; }
}
export async function loader() { return 1; }
