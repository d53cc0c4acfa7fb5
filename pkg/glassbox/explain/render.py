from glassbox.explain.views import Attribution, PdpProfile, EmbeddingSet, ProbeStep
from glassbox.simulation.views import SubjectDataset
from glassbox.interpretable.views import SparseLogisticFit
from pathlib import Path
import numpy as np
import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402

# fixed element ids and no timestamp so SVGs are reproducible byte for byte
plt.rcParams['svg.hashsalt']='glassbox'
SVG_METADATA={'Date':None,'Creator':None}

def _save(fig, path:str|Path)->Path:
    path=Path(path)
    path.parent.mkdir(parents=True,exist_ok=True)
    fig.savefig(path,format='svg',metadata=SVG_METADATA,bbox_inches='tight')
    plt.close(fig)
    return path

def attribution_heatmap(attribution:Attribution, path:str|Path, species_names:list[str]|None=None)->Path:
    '''Time x species heatmap; blue cells raise the target-class probability, red cells lower it.'''
    values=attribution.values
    limit=float(np.max(np.abs(values))) or 1.0
    fig,ax=plt.subplots(figsize=(10,4))
    image=ax.imshow(values.T,aspect='auto',cmap='RdBu',vmin=-limit,vmax=limit,origin='lower')
    ax.set_xlabel('Time')
    ax.set_ylabel('Species')
    if species_names is not None:
        ax.set_yticks(range(len(species_names)),species_names,fontsize=4)
    ax.set_title(f"{attribution.method} | sample {attribution.sample_id} | class {attribution.target_class}")
    fig.colorbar(image,ax=ax)
    return _save(fig,path)

def pdp_profile(profile:PdpProfile, path:str|Path)->Path:
    fig,ax=plt.subplots(figsize=(6,4))
    ax.plot(profile.grid,profile.profile,marker='o')
    ax.set_xlabel(profile.feature_name or f'feature {profile.feature}')
    ax.set_ylabel('Mean predicted probability')
    ax.set_ylim(0.0,1.0)
    return _save(fig,path)

def embedding_scatter(embeddings:EmbeddingSet, labels:np.ndarray, path:str|Path, title:str|None=None)->Path:
    '''Scores on the first two sparse principal directions, colored by class.'''
    if embeddings.scores is None or embeddings.scores.shape[1]<2:
        raise ValueError("embedding_scatter needs an EmbeddingSet projected onto at least two components")
    labels=np.asarray(labels)
    fig,ax=plt.subplots(figsize=(6,6))
    for value,color,name in ((0,'tab:blue','healthy'),(1,'tab:red','disease')):
        rows=labels==value
        ax.scatter(embeddings.scores[rows,0],embeddings.scores[rows,1],s=8,c=color,label=name)
    ratio=embeddings.explained_variance
    ax.set_xlabel(f'Sparse PC1 ({ratio[0]:.3g})')
    ax.set_ylabel(f'Sparse PC2 ({ratio[1]:.3g})')
    ax.set_title(title or f'{embeddings.layer} ({embeddings.pooling})')
    ax.legend()
    return _save(fig,path)

def coefficient_path(fit:SparseLogisticFit, path:str|Path, top:int=10)->Path:
    '''Coefficient paths over the lambda grid for the `top` features with the largest final |beta|.'''
    if fit.path_coefficients is None or fit.lambda_path is None:
        raise ValueError("coefficient_path needs a fit that carries its regularization path")
    chosen=np.argsort(-np.abs(fit.beta),kind='stable')[:top]
    fig,ax=plt.subplots(figsize=(7,4))
    for j in chosen:
        ax.plot(fit.lambda_path,fit.path_coefficients[:,j],label=fit.feature_names[j] if fit.feature_names else str(j))
    ax.set_xscale('log')
    ax.axvline(fit.lam,color='black',linestyle='--',linewidth=0.8)
    ax.set_xlabel('lambda')
    ax.set_ylabel('Coefficient')
    ax.legend(fontsize=6)
    return _save(fig,path)

def _top_species(values:np.ndarray, n_species:int)->list[int]:
    '''Species (columns) ordered by total |value| over time, ties to the lower index.'''
    totals=np.abs(values).sum(axis=0)
    return [int(d) for d in np.argsort(-totals,kind='stable')[:n_species]]

def trajectory_overlay(attribution:Attribution, dataset:SubjectDataset, path:str|Path, species:list[int]|None=None,
    n_species:int=4)->Path:
    '''
    The attributed subject's abundance trajectories, one panel per species, with each timepoint colored by its
    attribution on the heatmap's scale. Without an explicit species list the n_species columns carrying the most
    total |attribution| are drawn.
    '''
    if not 0<=attribution.sample_id<dataset.n_subjects:
        raise ValueError(f"Attribution sample {attribution.sample_id} out of range for {dataset.n_subjects} subjects")
    if attribution.shape!=(dataset.n_timepoints,dataset.n_species):
        raise ValueError(f"Attribution has shape {attribution.shape}, dataset cells are "
            f"{(dataset.n_timepoints,dataset.n_species)}")
    chosen=list(species) if species is not None else _top_species(attribution.values,n_species)
    if not chosen or any(not 0<=d<dataset.n_species for d in chosen):
        raise ValueError(f"Species {chosen} out of range for D={dataset.n_species}")
    trajectory=dataset.X[attribution.sample_id]
    limit=float(np.max(np.abs(attribution.values))) or 1.0
    time=np.arange(dataset.n_timepoints)
    fig,axes=plt.subplots(len(chosen),1,figsize=(7,1.8*len(chosen)),sharex=True,squeeze=False)
    for ax,d in zip(axes[:,0],chosen):
        ax.plot(time,trajectory[:,d],color='grey',linewidth=0.8)
        points=ax.scatter(time,trajectory[:,d],c=attribution.values[:,d],cmap='RdBu',vmin=-limit,vmax=limit,s=14)
        ax.set_ylabel(f'species {d}',fontsize=8)
    axes[-1,0].set_xlabel('Time')
    axes[0,0].set_title(f"{attribution.method} | sample {attribution.sample_id} | class {attribution.target_class}")
    fig.colorbar(points,ax=axes[:,0].tolist())
    return _save(fig,path)

def interpolation_trajectories(probe:list[ProbeStep], dataset:SubjectDataset, path:str|Path,
    species:list[int]|None=None, n_species:int=4)->Path:
    '''
    Trajectories of the subjects nearest to each probe interpolant, colored from the first endpoint (alpha 0) to
    the second (alpha 1). Without an explicit species list the species that vary most across those subjects
    are drawn.
    '''
    if not probe:
        raise ValueError("interpolation_trajectories needs at least one probe step")
    ids=[step.nearest_id for step in probe]
    if any(not 0<=i<dataset.n_subjects for i in ids):
        raise ValueError(f"Probe subjects {ids} out of range for {dataset.n_subjects} subjects")
    trajectories=dataset.X[ids]
    chosen=list(species) if species is not None else _top_species(trajectories.std(axis=0),n_species)
    if not chosen or any(not 0<=d<dataset.n_species for d in chosen):
        raise ValueError(f"Species {chosen} out of range for D={dataset.n_species}")
    colors=plt.get_cmap('viridis')
    time=np.arange(dataset.n_timepoints)
    fig,axes=plt.subplots(len(chosen),1,figsize=(7,1.8*len(chosen)),sharex=True,squeeze=False)
    for ax,d in zip(axes[:,0],chosen):
        for step,trajectory in zip(probe,trajectories):
            ax.plot(time,trajectory[:,d],color=colors(step.alpha),linewidth=0.9)
        ax.set_ylabel(f'species {d}',fontsize=8)
    axes[-1,0].set_xlabel('Time')
    axes[0,0].set_title(f'Nearest subjects along the probe ({ids[0]} to {ids[-1]})')
    fig.colorbar(plt.cm.ScalarMappable(norm=matplotlib.colors.Normalize(0.0,1.0),cmap=colors),ax=axes[:,0].tolist(),label='alpha')
    return _save(fig,path)
