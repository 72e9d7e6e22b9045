/** Echarts option builders and SVG rendering (server-side, no DOM). */

import * as echarts from 'echarts';
import { writeFileSync } from 'fs';
import { Trace, cumulativeLandmarks, regretSeries } from './trace';

const PALETTE = ['#4c78a8', '#f58518', '#54a24b', '#e45756', '#72b7b2', '#b279a2'];

function sqrtLogEnvelope(T: number, scale: number): Array<[number, number]> {
  const pts: Array<[number, number]> = [];
  const steps = Math.min(T, 200);
  for (let k = 1; k <= steps; k++) {
    const t = Math.max(2, Math.round((k / steps) * T));
    pts.push([t, scale * Math.sqrt(t * Math.log(t))]);
  }
  return pts;
}

export function regretFigure(traces: Trace[]): echarts.EChartsCoreOption {
  const series: object[] = [];
  let envelopeScale = 0;
  const normalized: Array<[number, number]> = [];
  traces.forEach((trace, i) => {
    const { values, exact } = regretSeries(trace);
    const T = values.length;
    const final = values[T - 1] ?? 0;
    envelopeScale = Math.max(envelopeScale, final / Math.sqrt(T * Math.log(Math.max(T, 2))));
    normalized.push([T, final / Math.sqrt(T * Math.log(Math.max(T, 2)))]);
    series.push({
      name: `${trace.name}${exact ? '' : ' (cumulative loss)'}`,
      type: 'line',
      showSymbol: false,
      data: trace.t.map((t, k) => [t, values[k]]),
      lineStyle: { width: 1.5, color: PALETTE[i % PALETTE.length] },
      color: PALETTE[i % PALETTE.length],
      xAxisIndex: 0,
      yAxisIndex: 0,
    });
  });
  const maxT = Math.max(...traces.map((tr) => tr.t.length), 2);
  series.push({
    name: 'sqrt(T log T) envelope',
    type: 'line',
    showSymbol: false,
    data: sqrtLogEnvelope(maxT, envelopeScale),
    lineStyle: { width: 1, type: 'dashed', color: '#888888' },
    color: '#888888',
    xAxisIndex: 0,
    yAxisIndex: 0,
  });
  series.push({
    name: 'final regret / sqrt(T log T)',
    type: 'scatter',
    symbolSize: 9,
    data: normalized,
    color: '#333333',
    xAxisIndex: 1,
    yAxisIndex: 1,
  });
  return {
    animation: false,
    backgroundColor: '#ffffff',
    title: [
      { text: 'Cumulative regret', left: '12%', textStyle: { fontSize: 13 } },
      { text: 'Scaling (normalized final regret)', left: '72%', textStyle: { fontSize: 13 } },
    ],
    legend: { bottom: 0, type: 'scroll' },
    grid: [
      { left: '6%', right: '40%', top: 40, bottom: 60 },
      { left: '68%', right: '4%', top: 40, bottom: 60 },
    ],
    xAxis: [
      { type: 'value', name: 't', gridIndex: 0 },
      { type: 'log', name: 'T', gridIndex: 1 },
    ],
    yAxis: [
      { type: 'value', name: 'regret', gridIndex: 0 },
      { type: 'value', name: 'normalized', gridIndex: 1 },
    ],
    series,
  };
}

export function landmarkFigure(trace: Trace): echarts.EChartsCoreOption {
  const cum = cumulativeLandmarks(trace);
  const T = cum.length;
  const total = cum[T - 1] ?? 0;
  const guideScale = total / Math.sqrt(Math.max(T, 1));
  const guide: Array<[number, number]> = trace.t.map((t) => [t, guideScale * Math.sqrt(t)]);
  return {
    animation: false,
    backgroundColor: '#ffffff',
    title: { text: `Landmark Hessian refreshes (${total} in ${T} rounds)`, left: 'center' },
    legend: { bottom: 0 },
    grid: { left: 60, right: 30, top: 50, bottom: 60 },
    xAxis: { type: 'value', name: 't' },
    yAxis: { type: 'value', name: 'cumulative updates' },
    series: [
      {
        name: trace.name,
        type: 'line',
        step: 'end',
        showSymbol: false,
        data: trace.t.map((t, k) => [t, cum[k]]),
        color: PALETTE[0],
      },
      {
        name: 'C sqrt(t) guide',
        type: 'line',
        showSymbol: false,
        data: guide,
        lineStyle: { type: 'dashed', color: '#888888' },
        color: '#888888',
      },
    ],
  };
}

export function renderToSvgFile(option: echarts.EChartsCoreOption, outPath: string,
                                width = 1000, height = 420): void {
  const chart = echarts.init(null, null, { renderer: 'svg', ssr: true, width, height });
  chart.setOption(option);
  const svg = chart.renderToSVGString();
  chart.dispose();
  writeFileSync(outPath, svg);
}
