/** Serial request gate: starting a new request aborts the superseded one. */

export class InflightGate {
  private controller: AbortController | null = null;

  next(): AbortSignal {
    if (this.controller) this.controller.abort();
    this.controller = new AbortController();
    return this.controller.signal;
  }
}
